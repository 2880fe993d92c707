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

#include "radioloc/locnet.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace radioloc
{

struct TrainConfig
{
    int epochs = 50;
    int batch_size = 15;
    double lr = 1e-4;
    int lr_decay_every = 30;     // epochs
    double lr_decay_factor = 10.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double width_divisor = 5.0;
    int min_channels = 1;
    double output_bias = 0.1;
    double output_init_gain = 0.01;
    std::string output_activation = "leaky";
    double input_scale = 1.0;
    bool augment = false;  // random flips and transposes of each training sample
    std::uint64_t seed = 0;

    // Reference 256 x 256 schedule: lr 1e-5.
    static TrainConfig reference_schedule()
    {
        TrainConfig c;
        c.lr = 1e-5;
        return c;
    }

    // Small-data schedule: softmax heat map, inputs scaled by 20, dihedral augmentation,
    // at least 16 channels per layer, lr 1e-4, batch 4.
    static TrainConfig desk_schedule()
    {
        TrainConfig c;
        c.lr = 1e-4;
        c.min_channels = 16;
        c.batch_size = 4;
        c.output_activation = "softmax";
        c.input_scale = 20.0;
        c.augment = true;
        return c;
    }

    // Learning rate used during a 1-indexed epoch.
    double lr_at(int epoch) const;
};

struct EpochLog
{
    int epoch = 0;
    double lr = 0.0;
    double train_mae = 0.0;  // pixels
    double val_mae = 0.0;    // pixels
};

struct TrainResult
{
    LocNet model;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_val_mae = 0.0;
};

class Adam
{
public:
    Adam(std::vector<ParamBlock> params, double beta1, double beta2, double eps);
    void step(double lr);

private:
    std::vector<ParamBlock> params_;
    std::vector<std::vector<double>> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

// Minimizes the mean localization distance over mini-batches and keeps the weights with the
// lowest validation MAE. Throws on a non-finite loss, naming the epoch and batch.
TrainResult locnet_train(std::span<const Sample> train, std::span<const Sample> val, const TrainConfig &config,
                         const std::function<void(const EpochLog &)> &on_epoch = {});

// MAE in pixels of a model over samples.
// Flips x (bit 0), flips y (bit 1), then transposes (bit 2) every channel of an n x n input and the truth.
void dihedral_augment(Tensor &x, Vec2 &truth, int n, unsigned code);

double evaluate_mae(LocNet &model, std::span<const Sample> samples);

void write_train_log(const std::filesystem::path &path, const std::vector<EpochLog> &log);

} // namespace radioloc
