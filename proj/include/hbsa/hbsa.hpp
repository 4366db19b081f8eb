// Copyright 2026 The hbsa Authors
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

#include "hbsa/error.hpp"
#include "hbsa/state.hpp"
#include "hbsa/elements.hpp"
#include "hbsa/gates.hpp"
#include "hbsa/circuit.hpp"
#include "hbsa/circuit_io.hpp"
#include "hbsa/measurement.hpp"
#include "hbsa/dense.hpp"
#include "hbsa/oracle.hpp"
#include "hbsa/bsa.hpp"
