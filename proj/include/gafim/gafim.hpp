// Copyright 2026, the gafim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gafim/error.hpp"
#include "gafim/itemset.hpp"
#include "gafim/database.hpp"
#include "gafim/apriori.hpp"
#include "gafim/rules.hpp"
#include "gafim/rng.hpp"
#include "gafim/ga_miner.hpp"
#include "gafim/perf_measures.hpp"
#include "gafim/report.hpp"
