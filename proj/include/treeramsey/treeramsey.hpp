#pragma once

#include "treeramsey/core.hpp"
#include "treeramsey/io.hpp"
#include "treeramsey/markov.hpp"
#include "treeramsey/rational.hpp"
#include "treeramsey/rng.hpp"
#include "treeramsey/search.hpp"
#include "treeramsey/sets.hpp"
#include "treeramsey/witness.hpp"
#include "treeramsey/words.hpp"
