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

#include "radioloc/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace radioloc
{

void dihedral_augment(Tensor &x, Vec2 &truth, int n, unsigned code)
{
    if (code == 0)
        return;
    auto map = [&](int px, int py) {
        if (code & 1u)
            px = n + 1 - px;
        if (code & 2u)
            py = n + 1 - py;
        if (code & 4u)
            std::swap(px, py);
        return std::pair{px, py};
    };
    Tensor out(x.rows(), x.cols());
    for (int y = 1; y <= n; ++y)
        for (int xx = 1; xx <= n; ++xx)
        {
            const auto [dx, dy] = map(xx, y);
            out.col(Eigen::Index(dy - 1) * n + (dx - 1)) = x.col(Eigen::Index(y - 1) * n + (xx - 1));
        }
    x = std::move(out);
    const auto [tx, ty] = map(int(truth.x()), int(truth.y()));
    truth = Vec2(tx, ty);
}

double TrainConfig::lr_at(int epoch) const
{
    const int decays = lr_decay_every > 0 ? (epoch - 1) / lr_decay_every : 0;
    return lr / std::pow(lr_decay_factor, decays);
}

Adam::Adam(std::vector<ParamBlock> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps)
{
    for (const auto &p : params_)
    {
        m_.emplace_back(p.size, 0.0);
        v_.emplace_back(p.size, 0.0);
    }
}

void Adam::step(double lr)
{
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, double(t_));
    const double c2 = 1.0 - std::pow(beta2_, double(t_));
    for (std::size_t b = 0; b < params_.size(); ++b)
    {
        auto &p = params_[b];
        auto &m = m_[b];
        auto &v = v_[b];
        for (std::size_t i = 0; i < p.size; ++i)
        {
            const double g = p.grad[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
            p.value[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
        }
    }
}

double evaluate_mae(LocNet &model, std::span<const Sample> samples)
{
    if (samples.empty())
        throw std::invalid_argument("evaluate_mae: no samples");
    double sum = 0.0;
    for (const auto &s : samples)
    {
        const auto out = model.forward(encode_inputs(s));
        sum += std::hypot(out.estimate.x - s.truth.x, out.estimate.y - s.truth.y);
    }
    return sum / double(samples.size());
}

TrainResult locnet_train(std::span<const Sample> train, std::span<const Sample> val, const TrainConfig &config,
                         const std::function<void(const EpochLog &)> &on_epoch)
{
    if (train.empty() || val.empty())
        throw std::invalid_argument("locnet_train: train and validation sets must be non-empty");
    if (config.epochs < 1 || config.batch_size < 1)
        throw std::invalid_argument("locnet_train: epochs and batch_size must be >= 1");

    const int n = train.front().scene->city.size_px;
    const int in_ch = int(3 * train.front().p_meas.size() + 1);
    LocNetSpec spec = LocNetSpec::scaled(n, in_ch, config.width_divisor, config.seed, config.min_channels);
    spec.output_bias = config.output_bias;
    spec.output_init_gain = config.output_init_gain;
    spec.output_activation = config.output_activation;
    spec.input_scale = config.input_scale;
    spec.validate();
    LocNet model(spec);
    Adam adam(model.parameters(), config.beta1, config.beta2, config.adam_eps);

    TrainResult result{model, {}, 0, std::numeric_limits<double>::infinity()};
    std::mt19937_64 rng(config.seed ^ 0x5eedULL);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= config.epochs; ++epoch)
    {
        const double lr = config.lr_at(epoch);
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        int batch_id = 0;
        for (std::size_t start = 0; start < order.size(); start += std::size_t(config.batch_size), ++batch_id)
        {
            const std::size_t end = std::min(order.size(), start + std::size_t(config.batch_size));
            const double weight = 1.0 / double(end - start);
            model.zero_grad();
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i)
            {
                const Sample &s = train[order[i]];
                Tensor x = encode_inputs(s);
                Vec2 truth(s.truth.x, s.truth.y);
                if (config.augment)
                    dihedral_augment(x, truth, n, unsigned(rng() % 8));
                ForwardResult out;
                try
                {
                    out = model.forward(x);
                }
                catch (const std::domain_error &e)
                {
                    throw std::runtime_error("locnet_train: diverged at epoch " + std::to_string(epoch) + " batch " +
                                             std::to_string(batch_id) + ": " + e.what());
                }
                batch_loss += std::hypot(out.estimate.x - truth.x(), out.estimate.y - truth.y());
                model.backward(distance_loss_grad(out, truth, n, weight));
            }
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("locnet_train: non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                                         std::to_string(batch_id));
            loss_sum += batch_loss;
            adam.step(lr);
        }

        EpochLog row{epoch, lr, loss_sum / double(order.size()), evaluate_mae(model, val)};
        result.log.push_back(row);
        if (row.val_mae < result.best_val_mae)
        {
            result.best_val_mae = row.val_mae;
            result.best_epoch = epoch;
            result.model = model;
        }
        if (on_epoch)
            on_epoch(row);
    }
    return result;
}

void write_train_log(const std::filesystem::path &path, const std::vector<EpochLog> &log)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out.precision(17);
    out << "epoch,lr,train_mae,val_mae\n";
    for (const auto &r : log)
        out << r.epoch << ',' << r.lr << ',' << r.train_mae << ',' << r.val_mae << '\n';
}

} // namespace radioloc
