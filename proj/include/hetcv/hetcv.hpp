/**
 * Copyright 2026 The hetcv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "hetcv/certify.hpp"
#include "hetcv/errors.hpp"
#include "hetcv/estimator.hpp"
#include "hetcv/fock.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/io.hpp"
#include "hetcv/numeric.hpp"
#include "hetcv/oracle.hpp"
#include "hetcv/random_states.hpp"
#include "hetcv/run.hpp"
#include "hetcv/tomography.hpp"
