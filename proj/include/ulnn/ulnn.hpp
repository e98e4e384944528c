// include/ulnn/ulnn.hpp
//
// Copyright 2026 The ulnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ulnn/bridge.hpp"
#include "ulnn/distributions.hpp"
#include "ulnn/ica.hpp"
#include "ulnn/io/config.hpp"
#include "ulnn/io/matrix_file.hpp"
#include "ulnn/io/model_file.hpp"
#include "ulnn/io/models.hpp"
#include "ulnn/io/text_formats.hpp"
#include "ulnn/linalg.hpp"
#include "ulnn/parallel.hpp"
#include "ulnn/pipeline.hpp"
#include "ulnn/plot_data.hpp"
#include "ulnn/synthetic.hpp"
#include "ulnn/taxonomy.hpp"
#include "ulnn/types.hpp"
#include "ulnn/whitening.hpp"
#include "ulnn/zeroshot.hpp"
