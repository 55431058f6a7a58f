#pragma once

#include "repstat/corpus.hpp"
#include "repstat/error.hpp"
#include "repstat/normalize.hpp"
#include "repstat/random.hpp"
#include "repstat/repfig.hpp"
#include "repstat/scorer.hpp"
#include "repstat/simlab.hpp"
#include "repstat/urn.hpp"
