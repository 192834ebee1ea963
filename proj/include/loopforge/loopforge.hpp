// Copyright 2026 The loopforge Authors
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

// Header-only numerical core. io.hpp and harness.hpp need the compiled library.

#pragma once

#include "loopforge/classify.hpp"
#include "loopforge/core.hpp"
#include "loopforge/embed.hpp"
#include "loopforge/matrix_functions.hpp"
#include "loopforge/pipeline.hpp"
#include "loopforge/splitting.hpp"
#include "loopforge/su2_basis.hpp"
#include "loopforge/trig_loop.hpp"
#include "loopforge/vp_approx.hpp"
