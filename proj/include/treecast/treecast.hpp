// Copyright 2026 The Treecast Authors.
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

#ifndef TREECAST_TREECAST_HPP_
#define TREECAST_TREECAST_HPP_

#include "treecast/align.hpp"
#include "treecast/conllu.hpp"
#include "treecast/eval.hpp"
#include "treecast/linear_model.hpp"
#include "treecast/mst.hpp"
#include "treecast/parser.hpp"
#include "treecast/project.hpp"
#include "treecast/tagger.hpp"
#include "treecast/vote.hpp"

#endif  // TREECAST_TREECAST_HPP_
