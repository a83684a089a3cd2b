// Copyright 2026 The gnslab Authors
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

#include "gnslab/cli.hpp"
#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/nc_examples.hpp"
#include "gnslab/quasi_algebra.hpp"
#include "gnslab/random.hpp"
#include "gnslab/report.hpp"
#include "gnslab/serialization.hpp"
#include "gnslab/sesq_map.hpp"
