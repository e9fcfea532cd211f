// SPDX-License-Identifier: Apache-2.0
//
// riscf — RIS-assisted cell-free MIMO downlink simulator
// Copyright (C) 2026 riscf contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "riscf/association.hpp"
#include "riscf/beamforming.hpp"
#include "riscf/channel.hpp"
#include "riscf/config.hpp"
#include "riscf/evaluate.hpp"
#include "riscf/io.hpp"
#include "riscf/matching.hpp"
#include "riscf/parallel.hpp"
#include "riscf/phase_opt.hpp"
#include "riscf/phases.hpp"
#include "riscf/rng.hpp"
#include "riscf/topology.hpp"
#include "riscf/units.hpp"
