#pragma once

#include "orbitflow/algebra.hpp"
#include "orbitflow/control.hpp"
#include "orbitflow/dynamics.hpp"
#include "orbitflow/endpoint.hpp"
#include "orbitflow/flow.hpp"
#include "orbitflow/generate.hpp"
#include "orbitflow/io.hpp"
#include "orbitflow/objective.hpp"
#include "orbitflow/orbit.hpp"
#include "orbitflow/problem.hpp"
#include "orbitflow/rng.hpp"
#include "orbitflow/types.hpp"
#include "orbitflow/version.hpp"
