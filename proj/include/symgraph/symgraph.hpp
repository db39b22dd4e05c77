#pragma once

#include "symgraph/bounds.hpp"
#include "symgraph/errors.hpp"
#include "symgraph/experiments.hpp"
#include "symgraph/format.hpp"
#include "symgraph/graph.hpp"
#include "symgraph/meaning_space.hpp"
#include "symgraph/min_cut.hpp"
#include "symgraph/parallel.hpp"
#include "symgraph/params.hpp"
#include "symgraph/random.hpp"
#include "symgraph/reasoning.hpp"
#include "symgraph/sampler.hpp"
#include "symgraph/spectral.hpp"
