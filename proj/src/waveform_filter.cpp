// Copyright 2026 The tgates Authors
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

#include "tgates/constants.hpp"
#include "tgates/errors.hpp"
#include "tgates/kernels.hpp"
#include "tgates/waveform.hpp"

#include <cmath>

namespace tgates {

void FilterModel::validate() const {
    if (cutoff.empty()) throw InvalidArgument("filter needs at least one cutoff frequency");
    for (double f : cutoff) {
        if (!(f > 0.0)) throw InvalidArgument("filter cutoff frequencies must be positive");
    }
    if (order < 1) throw InvalidArgument("filter order must be at least 1");
}

VoltageWaveform apply_filter(const VoltageWaveform& waveform, const FilterModel& filter) {
    filter.validate();
    const std::size_t n_ch = waveform.n_channels;
    if (filter.cutoff.size() != 1 && filter.cutoff.size() != n_ch) {
        throw InvalidArgument("filter needs one cutoff or one per channel");
    }
    std::vector<double> poles(n_ch);
    for (std::size_t c = 0; c < n_ch; ++c) {
        const double fc = filter.cutoff.size() == 1 ? filter.cutoff[0] : filter.cutoff[c];
        poles[c] = std::exp(-kTwoPi * fc * waveform.dt());
    }
    VoltageWaveform out = waveform;
    for (int stage = 0; stage < filter.order; ++stage) {
        kernels::one_pole_lowpass(out.samples, n_ch, poles);
    }
    return out;
}

}  // namespace tgates
