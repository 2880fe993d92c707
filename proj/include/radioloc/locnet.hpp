// SPDX-License-Identifier: Apache-2.0
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

#include "radioloc/heatloc.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace radioloc
{

// Layer schedule of the encoder-decoder. Tensor k (k = 0..14) of the encoder has
// channels[k] channels at resolution res[k]; the decoder mirrors it with skip concatenations,
// the input is concatenated into the last two layers, and a final conv emits one channel.
struct LocNetSpec
{
    int size_px = 64;
    int in_channels = 16;
    double width_divisor = 5.0;
    int min_resolution = 2;
    int min_channels = 1;  // floor on every scaled width
    double leaky_slope = 0.01;
    double output_bias = 0.1;
    double output_init_gain = 0.01;  // scales the last layer's initial weights
    std::string output_activation = "leaky";  // "leaky" quasi-heat-map or "softmax" over pixels
    double input_scale = 1.0;                 // multiplies every input channel
    std::uint64_t seed = 0;

    std::vector<int> channels;         // 15 entries, encoder tensors
    std::vector<int> resolution;       // 15 entries
    std::vector<int> encoder_kernels;  // 14 entries
    std::vector<int> decoder_kernels;  // 15 entries

    // Scales the reference 256 x 256 schedule down to size_px with widths / width_divisor.
    static LocNetSpec scaled(int size_px, int in_channels, double width_divisor = 5.0, std::uint64_t seed = 0, int min_channels = 1);

    void validate() const;
    nlohmann::json to_json() const;
    static LocNetSpec from_json(const nlohmann::json &j);
};

struct ParamBlock
{
    double *value;
    double *grad;
    std::size_t size;
};

struct ForwardResult
{
    Tensor heatmap;  // 1 x N*N
    CenterOfMass estimate;
};

class LocNet
{
public:
    explicit LocNet(const LocNetSpec &spec);
    LocNet(const LocNet &other);
    LocNet &operator=(const LocNet &other);
    LocNet(LocNet &&) noexcept;
    LocNet &operator=(LocNet &&) noexcept;
    ~LocNet();

    const LocNetSpec &spec() const { return spec_; }

    // Quasi-heat-map and its center of mass. Caches activations for backward().
    ForwardResult forward(const Tensor &input);
    // Accumulates parameter gradients for d(loss)/d(heatmap) of the last forward() call.
    void backward(const Tensor &d_heatmap);

    void zero_grad();
    std::vector<ParamBlock> parameters();
    std::size_t parameter_count() const;

    // Writes stem.bin (magic RLNW, uint32 version, uint64 count, float64 weights) and stem.json.
    void save(const std::filesystem::path &stem) const;
    static LocNet load(const std::filesystem::path &stem);

private:
    struct Impl;
    LocNetSpec spec_;
    std::unique_ptr<Impl> impl_;
};

// Gradient of |estimate - truth| with respect to the heat map.
Tensor distance_loss_grad(const ForwardResult &out, const Vec2 &truth, int n, double weight = 1.0);

} // namespace radioloc
