#pragma once

#include "adr/answer.hpp"
#include "adr/cache.hpp"
#include "adr/config.hpp"
#include "adr/curator.hpp"
#include "adr/entropy.hpp"
#include "adr/error.hpp"
#include "adr/evalmetrics.hpp"
#include "adr/http_oracle.hpp"
#include "adr/lexicon.hpp"
#include "adr/reward.hpp"
#include "adr/rewriter.hpp"
#include "adr/rng.hpp"
#include "adr/rollout.hpp"
#include "adr/serialize.hpp"
#include "adr/text.hpp"
#include "adr/trace_format.hpp"
