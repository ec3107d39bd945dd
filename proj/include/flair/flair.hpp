#pragma once

#include "flair/boxcox.hpp"
#include "flair/cascade.hpp"
#include "flair/corpus.hpp"
#include "flair/diagnostics.hpp"
#include "flair/evaluate.hpp"
#include "flair/generator.hpp"
#include "flair/level.hpp"
#include "flair/metrics.hpp"
#include "flair/parallel.hpp"
#include "flair/period.hpp"
#include "flair/rank1.hpp"
#include "flair/reshape.hpp"
#include "flair/ridge.hpp"
#include "flair/rng.hpp"
#include "flair/series.hpp"
#include "flair/shape.hpp"
#include "flair/stats.hpp"
