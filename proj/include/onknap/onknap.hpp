// Copyright 2026 The onknap Authors
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


// Umbrella header.

#ifndef ONKNAP_ONKNAP_HPP
#define ONKNAP_ONKNAP_HPP

#include "onknap/acceptance.hpp"
#include "onknap/adversarial.hpp"
#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/evaluation.hpp"
#include "onknap/experiments.hpp"
#include "onknap/multi_instance.hpp"
#include "onknap/multiknapsack.hpp"
#include "onknap/optimum.hpp"
#include "onknap/parallel.hpp"
#include "onknap/thresholds.hpp"

#endif  // ONKNAP_ONKNAP_HPP
