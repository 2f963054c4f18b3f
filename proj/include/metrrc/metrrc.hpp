/**************************************************************************
 * metrrc.hpp
 *
 * Copyright 2026 The metrrc authors
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
 **************************************************************************/

#pragma once

#include "chunk_io.hpp"
#include "gf.hpp"
#include "linalg.hpp"
#include "locators.hpp"
#include "mbrr.hpp"
#include "msrr.hpp"
#include "params.hpp"
#include "rack_sim.hpp"
