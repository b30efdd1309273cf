// Copyright 2026 The gjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gjoin/bench.hpp"
#include "gjoin/bulk_graph.hpp"
#include "gjoin/error.hpp"
#include "gjoin/export.hpp"
#include "gjoin/graph.hpp"
#include "gjoin/ingest.hpp"
#include "gjoin/join.hpp"
#include "gjoin/predicate.hpp"
#include "gjoin/storage.hpp"
