#pragma once

#include "maoplb/consensus.hpp"
#include "maoplb/environment.hpp"
#include "maoplb/estimation.hpp"
#include "maoplb/experiment.hpp"
#include "maoplb/graph.hpp"
#include "maoplb/numerics.hpp"
#include "maoplb/policy.hpp"
#include "maoplb/rng.hpp"
#include "maoplb/simulation.hpp"
