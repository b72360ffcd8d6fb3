#pragma once

// Structure-preserving model order reduction for linear port-Hamiltonian
// systems with certified a-posteriori error bounds.

#include "phmor/basis.hpp"
#include "phmor/bounds.hpp"
#include "phmor/dissipation.hpp"
#include "phmor/error_snapshots.hpp"
#include "phmor/errors.hpp"
#include "phmor/input_signal.hpp"
#include "phmor/integrators.hpp"
#include "phmor/linalg.hpp"
#include "phmor/matrixmarket.hpp"
#include "phmor/models.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/projection.hpp"
#include "phmor/time_grid.hpp"
