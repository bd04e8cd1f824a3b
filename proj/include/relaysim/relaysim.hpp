/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "relaysim/analytic.hpp"
#include "relaysim/channel.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/power.hpp"
#include "relaysim/protocols.hpp"
#include "relaysim/rng.hpp"
#include "relaysim/special_math.hpp"
#include "relaysim/sweeps.hpp"
