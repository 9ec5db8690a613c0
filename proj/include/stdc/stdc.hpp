/**
 * Copyright 2026 The STDC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "stdc/audio_io.hpp"
#include "stdc/augment.hpp"
#include "stdc/classifier.hpp"
#include "stdc/config.hpp"
#include "stdc/feature_file.hpp"
#include "stdc/features.hpp"
#include "stdc/framing.hpp"
#include "stdc/fusion_stdc.hpp"
#include "stdc/ldp_sdc.hpp"
#include "stdc/melspec.hpp"
#include "stdc/metrics.hpp"
#include "stdc/model_io.hpp"
#include "stdc/pipeline.hpp"
#include "stdc/synth_corpus.hpp"
#include "stdc/temporal_stc.hpp"
#include "stdc/tensor.hpp"
