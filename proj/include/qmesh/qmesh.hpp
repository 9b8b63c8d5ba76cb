// Copyright 2026 the qmesh authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qmesh/calibration.hpp"
#include "qmesh/circuit_plan.hpp"
#include "qmesh/clements.hpp"
#include "qmesh/complex_matrix.hpp"
#include "qmesh/error_model.hpp"
#include "qmesh/errors.hpp"
#include "qmesh/io.hpp"
#include "qmesh/optim.hpp"
#include "qmesh/randomness.hpp"
#include "qmesh/rng.hpp"
#include "qmesh/simulator.hpp"
#include "qmesh/stats.hpp"
#include "qmesh/verifier.hpp"
#include "qmesh/version.hpp"
