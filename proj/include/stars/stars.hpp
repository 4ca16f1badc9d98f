#pragma once

// Convenience include for the whole library.

#include "stars/build_sorting.hpp"
#include "stars/build_threshold.hpp"
#include "stars/cluster.hpp"
#include "stars/core.hpp"
#include "stars/evaluate.hpp"
#include "stars/io.hpp"
#include "stars/lsh.hpp"
#include "stars/parallel.hpp"
#include "stars/rng.hpp"
#include "stars/similarity.hpp"
