#pragma once

#include "gq/analysis.hpp"
#include "gq/annotation.hpp"
#include "gq/backends.hpp"
#include "gq/bm25.hpp"
#include "gq/config.hpp"
#include "gq/corpus.hpp"
#include "gq/datagen.hpp"
#include "gq/error.hpp"
#include "gq/evidence.hpp"
#include "gq/extraction.hpp"
#include "gq/generation.hpp"
#include "gq/http_backend.hpp"
#include "gq/keywords.hpp"
#include "gq/metrics.hpp"
#include "gq/porter.hpp"
#include "gq/prompts.hpp"
#include "gq/rouge.hpp"
#include "gq/segment.hpp"
#include "gq/simulated_backend.hpp"
#include "gq/text.hpp"
