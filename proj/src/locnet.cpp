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

#include "radioloc/locnet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace radioloc
{

namespace
{

// Reference schedule at 256 x 256: encoder tensors In, 1..14 and the kernel of every conv.
constexpr std::array<int, 15> kRefChannels{16, 20, 50, 60, 70, 90, 100, 120, 120, 135, 150, 225, 300, 400, 500};
constexpr std::array<int, 15> kRefResolution{256, 256, 128, 64, 64, 32, 32, 16, 16, 16, 8, 8, 4, 4, 2};
constexpr std::array<int, 14> kRefEncoderKernels{3, 5, 5, 5, 5, 5, 5, 3, 5, 5, 5, 5, 5, 4};
constexpr std::array<int, 15> kRefDecoderKernels{4, 5, 4, 5, 4, 5, 3, 6, 5, 6, 5, 6, 6, 5, 5};
constexpr int kEncoderSteps = 14;
constexpr int kDecoderSteps = 15;

constexpr std::array<char, 4> kWeightMagic{'R', 'L', 'N', 'W'};
constexpr std::uint32_t kWeightVersion = 1;

class Conv2d
{
public:
    Conv2d() = default;
    Conv2d(int in, int out, int k) : in_(in), out_(out), k_(k), w_(out, in * k * k), b_(out), gw_(out, in * k * k), gb_(out)
    {
        w_.setZero();
        b_.setZero();
        gw_.setZero();
        gb_.setZero();
    }

    void init(std::mt19937_64 &rng, double slope)
    {
        const double fan_in = double(in_) * k_ * k_;
        const double bound = std::sqrt(6.0 / ((1.0 + slope * slope) * fan_in));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < w_.size(); ++i)
            w_.data()[i] = u(rng);
        b_.setZero();
    }

    // "Same" convolution; even kernels pad one more cell after than before.
    Tensor forward(const Tensor &x, int res)
    {
        res_ = res;
        im2col(x);
        Tensor y = w_ * cols_;
        y.colwise() += b_;
        return y;
    }

    Tensor backward(const Tensor &dy)
    {
        gw_.noalias() += dy * cols_.transpose();
        gb_ += dy.rowwise().sum();
        const Tensor dcols = w_.transpose() * dy;
        return col2im(dcols);
    }

    Eigen::MatrixXd &weights() { return w_; }
    Eigen::VectorXd &bias() { return b_; }
    Eigen::MatrixXd &weight_grad() { return gw_; }
    Eigen::VectorXd &bias_grad() { return gb_; }
    int in_channels() const { return in_; }
    int out_channels() const { return out_; }

private:
    void im2col(const Tensor &x)
    {
        const int n = res_, k = k_, pad = (k - 1) / 2;
        cols_.setZero(Eigen::Index(in_) * k * k, Eigen::Index(n) * n);
        for (int c = 0; c < in_; ++c)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                {
                    const Eigen::Index row = (Eigen::Index(c) * k + ky) * k + kx;
                    double *dst = cols_.row(row).data();
                    const double *src = x.row(c).data();
                    const int x_lo = std::max(0, pad - kx), x_hi = std::min(n, n + pad - kx);
                    for (int y = 0; y < n; ++y)
                    {
                        const int sy = y + ky - pad;
                        if (sy < 0 || sy >= n)
                            continue;
                        const double *s = src + std::size_t(sy) * n + (kx - pad);
                        double *d = dst + std::size_t(y) * n;
                        for (int xx = x_lo; xx < x_hi; ++xx)
                            d[xx] = s[xx];
                    }
                }
    }

    Tensor col2im(const Tensor &dcols) const
    {
        const int n = res_, k = k_, pad = (k - 1) / 2;
        Tensor dx = Tensor::Zero(in_, Eigen::Index(n) * n);
        for (int c = 0; c < in_; ++c)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                {
                    const Eigen::Index row = (Eigen::Index(c) * k + ky) * k + kx;
                    const double *src = dcols.row(row).data();
                    double *dst = dx.row(c).data();
                    const int x_lo = std::max(0, pad - kx), x_hi = std::min(n, n + pad - kx);
                    for (int y = 0; y < n; ++y)
                    {
                        const int sy = y + ky - pad;
                        if (sy < 0 || sy >= n)
                            continue;
                        double *d = dst + std::size_t(sy) * n + (kx - pad);
                        const double *s = src + std::size_t(y) * n;
                        for (int xx = x_lo; xx < x_hi; ++xx)
                            d[xx] += s[xx];
                    }
                }
        return dx;
    }

    int in_ = 0, out_ = 0, k_ = 1, res_ = 0;
    Eigen::MatrixXd w_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd gw_;
    Eigen::VectorXd gb_;
    Tensor cols_;
};

Tensor avg_pool2(const Tensor &x, int res)
{
    const int h = res / 2;
    Tensor y(x.rows(), Eigen::Index(h) * h);
    for (Eigen::Index c = 0; c < x.rows(); ++c)
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < h; ++xx)
            {
                const auto i = Eigen::Index(2 * yy) * res + 2 * xx;
                y(c, Eigen::Index(yy) * h + xx) = 0.25 * (x(c, i) + x(c, i + 1) + x(c, i + res) + x(c, i + res + 1));
            }
    return y;
}

Tensor avg_pool2_backward(const Tensor &dy, int res)
{
    const int h = res / 2;
    Tensor dx(dy.rows(), Eigen::Index(res) * res);
    for (Eigen::Index c = 0; c < dy.rows(); ++c)
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < h; ++xx)
            {
                const double g = 0.25 * dy(c, Eigen::Index(yy) * h + xx);
                const auto i = Eigen::Index(2 * yy) * res + 2 * xx;
                dx(c, i) = dx(c, i + 1) = dx(c, i + res) = dx(c, i + res + 1) = g;
            }
    return dx;
}

// Bilinear x2 upsampling with half-pixel centers, edges clamped.
struct Tap
{
    int i0, i1;
    double w0, w1;
};

std::vector<Tap> upsample_taps(int in_res)
{
    std::vector<Tap> taps(std::size_t(2 * in_res));
    for (int o = 0; o < 2 * in_res; ++o)
    {
        const double src = std::max(0.0, (o + 0.5) / 2.0 - 0.5);
        const int i0 = std::min(int(src), in_res - 1);
        const int i1 = std::min(i0 + 1, in_res - 1);
        const double f = src - i0;
        taps[std::size_t(o)] = {i0, i1, 1.0 - f, f};
    }
    return taps;
}

Tensor upsample2(const Tensor &x, int res)
{
    const int out = 2 * res;
    const auto taps = upsample_taps(res);
    Tensor y(x.rows(), Eigen::Index(out) * out);
    for (Eigen::Index c = 0; c < x.rows(); ++c)
        for (int oy = 0; oy < out; ++oy)
        {
            const Tap &ty = taps[std::size_t(oy)];
            for (int ox = 0; ox < out; ++ox)
            {
                const Tap &tx = taps[std::size_t(ox)];
                const auto r0 = Eigen::Index(ty.i0) * res, r1 = Eigen::Index(ty.i1) * res;
                y(c, Eigen::Index(oy) * out + ox) = ty.w0 * (tx.w0 * x(c, r0 + tx.i0) + tx.w1 * x(c, r0 + tx.i1)) +
                                                    ty.w1 * (tx.w0 * x(c, r1 + tx.i0) + tx.w1 * x(c, r1 + tx.i1));
            }
        }
    return y;
}

Tensor upsample2_backward(const Tensor &dy, int res)
{
    const int out = 2 * res;
    const auto taps = upsample_taps(res);
    Tensor dx = Tensor::Zero(dy.rows(), Eigen::Index(res) * res);
    for (Eigen::Index c = 0; c < dy.rows(); ++c)
        for (int oy = 0; oy < out; ++oy)
        {
            const Tap &ty = taps[std::size_t(oy)];
            for (int ox = 0; ox < out; ++ox)
            {
                const Tap &tx = taps[std::size_t(ox)];
                const double g = dy(c, Eigen::Index(oy) * out + ox);
                const auto r0 = Eigen::Index(ty.i0) * res, r1 = Eigen::Index(ty.i1) * res;
                dx(c, r0 + tx.i0) += ty.w0 * tx.w0 * g;
                dx(c, r0 + tx.i1) += ty.w0 * tx.w1 * g;
                dx(c, r1 + tx.i0) += ty.w1 * tx.w0 * g;
                dx(c, r1 + tx.i1) += ty.w1 * tx.w1 * g;
            }
        }
    return dx;
}

// [upsample] -> conv -> leaky ReLU -> [avg pool]
struct ConvStep
{
    Conv2d conv;
    int in_res = 0;
    bool upsample = false;
    bool pool = false;
    double slope = 0.01;
    Tensor pre;  // pre-activation cache

    int conv_res() const { return upsample ? 2 * in_res : in_res; }

    Tensor forward(const Tensor &x)
    {
        const int r = conv_res();
        pre = upsample ? conv.forward(upsample2(x, in_res), r) : conv.forward(x, r);
        Tensor a = pre.unaryExpr([s = slope](double v) { return v > 0.0 ? v : s * v; });
        return pool ? avg_pool2(a, r) : a;
    }

    Tensor backward(const Tensor &dy)
    {
        const int r = conv_res();
        Tensor da = pool ? avg_pool2_backward(dy, r) : dy;
        da = da.cwiseProduct(pre.unaryExpr([s = slope](double v) { return v > 0.0 ? 1.0 : s; }));
        Tensor dx = conv.backward(da);
        return upsample ? upsample2_backward(dx, in_res) : dx;
    }
};

Tensor vstack(std::initializer_list<const Tensor *> parts)
{
    Eigen::Index rows = 0;
    for (auto *p : parts)
        rows += p->rows();
    Tensor out(rows, (*parts.begin())->cols());
    Eigen::Index r = 0;
    for (auto *p : parts)
    {
        out.middleRows(r, p->rows()) = *p;
        r += p->rows();
    }
    return out;
}

} // namespace

LocNetSpec LocNetSpec::scaled(int size_px, int in_channels, double width_divisor, std::uint64_t seed, int min_channels)
{
    LocNetSpec s;
    s.size_px = size_px;
    s.in_channels = in_channels;
    s.width_divisor = width_divisor;
    s.seed = seed;
    s.min_channels = std::max(1, min_channels);
    s.channels.resize(kRefChannels.size());
    s.resolution.resize(kRefResolution.size());
    s.channels[0] = in_channels;
    s.resolution[0] = size_px;
    for (std::size_t k = 1; k < kRefChannels.size(); ++k)
    {
        s.channels[k] = std::max(s.min_channels, int(std::lround(kRefChannels[k] / width_divisor)));
        const bool halves = kRefResolution[k] < kRefResolution[k - 1];
        const int prev = s.resolution[k - 1];
        s.resolution[k] = halves && prev / 2 >= s.min_resolution ? prev / 2 : prev;
    }
    s.encoder_kernels.assign(kRefEncoderKernels.begin(), kRefEncoderKernels.end());
    s.decoder_kernels.assign(kRefDecoderKernels.begin(), kRefDecoderKernels.end());
    s.validate();
    return s;
}

void LocNetSpec::validate() const
{
    if (channels.size() != 15 || resolution.size() != 15 || encoder_kernels.size() != kEncoderSteps ||
        decoder_kernels.size() != kDecoderSteps)
        throw std::invalid_argument("LocNetSpec: schedule has the wrong number of layers");
    if (resolution[0] != size_px || channels[0] != in_channels)
        throw std::invalid_argument("LocNetSpec: first layer must match the input");
    for (std::size_t k = 1; k < resolution.size(); ++k)
    {
        const int a = resolution[k - 1], b = resolution[k];
        if (!(b == a || (2 * b == a)))
            throw std::invalid_argument("LocNetSpec: resolution must stay or halve between layers (size_px " +
                                        std::to_string(size_px) + " not reducible)");
    }
    for (int c : channels)
        if (c < 1)
            throw std::invalid_argument("LocNetSpec: channel widths must be positive");
    if (output_activation != "leaky" && output_activation != "softmax")
        throw std::invalid_argument("LocNetSpec: unknown output activation '" + output_activation + "'");
    if (!(input_scale > 0.0))
        throw std::invalid_argument("LocNetSpec: input_scale must be positive");
}

nlohmann::json LocNetSpec::to_json() const
{
    return nlohmann::json{{"architecture", "locnet-unet"},
                          {"size_px", size_px},
                          {"in_channels", in_channels},
                          {"width_divisor", width_divisor},
                          {"min_resolution", min_resolution},
                          {"min_channels", min_channels},
                          {"leaky_slope", leaky_slope},
                          {"output_bias", output_bias},
                          {"output_init_gain", output_init_gain},
                          {"output_activation", output_activation},
                          {"input_scale", input_scale},
                          {"seed", seed},
                          {"channels", channels},
                          {"resolution", resolution},
                          {"encoder_kernels", encoder_kernels},
                          {"decoder_kernels", decoder_kernels}};
}

LocNetSpec LocNetSpec::from_json(const nlohmann::json &j)
{
    LocNetSpec s;
    s.size_px = j.at("size_px").get<int>();
    s.in_channels = j.at("in_channels").get<int>();
    s.width_divisor = j.at("width_divisor").get<double>();
    s.min_resolution = j.at("min_resolution").get<int>();
    s.min_channels = j.value("min_channels", 1);
    s.leaky_slope = j.at("leaky_slope").get<double>();
    s.output_bias = j.at("output_bias").get<double>();
    s.output_init_gain = j.value("output_init_gain", s.output_init_gain);
    s.output_activation = j.value("output_activation", s.output_activation);
    s.input_scale = j.value("input_scale", s.input_scale);
    s.seed = j.at("seed").get<std::uint64_t>();
    s.channels = j.at("channels").get<std::vector<int>>();
    s.resolution = j.at("resolution").get<std::vector<int>>();
    s.encoder_kernels = j.at("encoder_kernels").get<std::vector<int>>();
    s.decoder_kernels = j.at("decoder_kernels").get<std::vector<int>>();
    s.validate();
    return s;
}

struct LocNet::Impl
{
    std::vector<ConvStep> enc;  // enc[k] maps tensor k to tensor k+1
    std::vector<ConvStep> dec;  // dec[i] produces decoder layer 15+i
    std::vector<Tensor> t;      // encoder tensors 0..14
    std::vector<Tensor> x;      // decoder layers 14..29 (x[0] = t[14])
    Tensor heat;                // softmax output, when used
    CenterOfMass com;

    // Channel count of the skip tensors appended after decoder step i.
    static std::vector<int> skips(int i)
    {
        const int layer = 15 + i;
        if (layer <= 26)
            return {28 - layer};
        if (layer == 27)
            return {1, 0};
        if (layer == 28)
            return {0};
        return {};
    }
};

LocNet::LocNet(const LocNetSpec &spec) : spec_(spec), impl_(std::make_unique<Impl>())
{
    spec_.validate();
    std::mt19937_64 rng(spec_.seed);
    const auto &ch = spec_.channels;
    const auto &res = spec_.resolution;

    for (int k = 0; k < kEncoderSteps; ++k)
    {
        ConvStep s;
        s.conv = Conv2d(ch[std::size_t(k)], ch[std::size_t(k + 1)], spec_.encoder_kernels[std::size_t(k)]);
        s.in_res = res[std::size_t(k)];
        s.pool = res[std::size_t(k + 1)] < res[std::size_t(k)];
        s.slope = spec_.leaky_slope;
        s.conv.init(rng, s.slope);
        impl_->enc.push_back(std::move(s));
    }

    int in_ch = ch[14], in_res = res[14];
    for (int i = 0; i < kDecoderSteps; ++i)
    {
        const int layer = 15 + i;
        int out_ch = 1, out_res = spec_.size_px;
        if (layer <= 28)
        {
            const int mirror = layer <= 27 ? 28 - layer : 1;
            out_ch = ch[std::size_t(mirror)];
            out_res = layer <= 27 ? res[std::size_t(28 - layer)] : spec_.size_px;
        }
        ConvStep s;
        s.conv = Conv2d(in_ch, out_ch, spec_.decoder_kernels[std::size_t(i)]);
        s.in_res = in_res;
        s.upsample = out_res > in_res;
        s.slope = spec_.leaky_slope;
        s.conv.init(rng, s.slope);
        impl_->dec.push_back(std::move(s));

        in_ch = out_ch;
        for (int sk : Impl::skips(i))
            in_ch += ch[std::size_t(sk)];
        in_res = out_res;
    }
    if (spec_.output_activation == "softmax")
        impl_->dec.back().slope = 1.0;  // linear logits
    impl_->dec.back().conv.weights() *= spec_.output_init_gain;
    impl_->dec.back().conv.bias().setConstant(spec_.output_bias);
}

LocNet::LocNet(const LocNet &other) : spec_(other.spec_), impl_(std::make_unique<Impl>(*other.impl_)) {}
LocNet &LocNet::operator=(const LocNet &other)
{
    if (this != &other)
    {
        spec_ = other.spec_;
        impl_ = std::make_unique<Impl>(*other.impl_);
    }
    return *this;
}
LocNet::LocNet(LocNet &&) noexcept = default;
LocNet &LocNet::operator=(LocNet &&) noexcept = default;
LocNet::~LocNet() = default;

ForwardResult LocNet::forward(const Tensor &input)
{
    const int n = spec_.size_px;
    if (input.rows() != spec_.in_channels || input.cols() != Eigen::Index(n) * n)
        throw std::invalid_argument("LocNet::forward: expected " + std::to_string(spec_.in_channels) + "x" + std::to_string(n * n) +
                                    " input, got " + std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
    auto &im = *impl_;
    im.t.resize(15);
    im.t[0] = spec_.input_scale == 1.0 ? input : Tensor(input * spec_.input_scale);
    for (int k = 0; k < kEncoderSteps; ++k)
        im.t[std::size_t(k + 1)] = im.enc[std::size_t(k)].forward(im.t[std::size_t(k)]);

    im.x.resize(kDecoderSteps + 1);
    im.x[0] = im.t[14];
    for (int i = 0; i < kDecoderSteps; ++i)
    {
        Tensor g = im.dec[std::size_t(i)].forward(im.x[std::size_t(i)]);
        const auto sk = Impl::skips(i);
        if (sk.empty())
            im.x[std::size_t(i + 1)] = std::move(g);
        else if (sk.size() == 1)
            im.x[std::size_t(i + 1)] = vstack({&g, &im.t[std::size_t(sk[0])]});
        else
            im.x[std::size_t(i + 1)] = vstack({&g, &im.t[std::size_t(sk[0])], &im.t[std::size_t(sk[1])]});
    }

    ForwardResult out;
    if (spec_.output_activation == "softmax")
    {
        const Tensor &z = im.x.back();
        im.heat = (z.array() - z.maxCoeff()).exp().matrix();
        im.heat /= im.heat.sum();
        out.heatmap = im.heat;
    }
    else
        out.heatmap = im.x.back();
    im.com = center_of_mass(std::span<const double>(out.heatmap.data(), std::size_t(out.heatmap.size())), n);
    out.estimate = im.com;
    return out;
}

void LocNet::backward(const Tensor &d_heatmap)
{
    auto &im = *impl_;
    if (im.x.empty())
        throw std::logic_error("LocNet::backward called before forward");
    std::vector<Tensor> dt(15);
    for (std::size_t k = 0; k < 15; ++k)
        dt[k] = Tensor::Zero(im.t[k].rows(), im.t[k].cols());

    Tensor dx = d_heatmap;
    if (spec_.output_activation == "softmax")
        dx = im.heat.cwiseProduct((d_heatmap.array() - d_heatmap.cwiseProduct(im.heat).sum()).matrix());
    for (int i = kDecoderSteps - 1; i >= 0; --i)
    {
        const auto &step = im.dec[std::size_t(i)];
        const Eigen::Index g_rows = step.conv.out_channels();
        Eigen::Index r = g_rows;
        for (int sk : Impl::skips(i))
        {
            const auto rows = dt[std::size_t(sk)].rows();
            dt[std::size_t(sk)] += dx.middleRows(r, rows);
            r += rows;
        }
        const Tensor dg = dx.topRows(g_rows);
        dx = im.dec[std::size_t(i)].backward(dg);
    }
    dt[14] += dx;
    for (int k = kEncoderSteps - 1; k >= 0; --k)
        dt[std::size_t(k)] += im.enc[std::size_t(k)].backward(dt[std::size_t(k + 1)]);
}

void LocNet::zero_grad()
{
    for (auto &b : parameters())
        std::fill(b.grad, b.grad + b.size, 0.0);
}

std::vector<ParamBlock> LocNet::parameters()
{
    std::vector<ParamBlock> out;
    auto add = [&](ConvStep &s) {
        out.push_back({s.conv.weights().data(), s.conv.weight_grad().data(), std::size_t(s.conv.weights().size())});
        out.push_back({s.conv.bias().data(), s.conv.bias_grad().data(), std::size_t(s.conv.bias().size())});
    };
    for (auto &s : impl_->enc)
        add(s);
    for (auto &s : impl_->dec)
        add(s);
    return out;
}

std::size_t LocNet::parameter_count() const
{
    std::size_t n = 0;
    for (const auto &b : const_cast<LocNet *>(this)->parameters())
        n += b.size;
    return n;
}

void LocNet::save(const std::filesystem::path &stem) const
{
    auto bin = stem;
    bin += ".bin";
    auto desc = stem;
    desc += ".json";
    std::ofstream out(bin, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + bin.string());
    const std::uint64_t count = parameter_count();
    out.write(kWeightMagic.data(), 4);
    out.write(reinterpret_cast<const char *>(&kWeightVersion), sizeof kWeightVersion);
    out.write(reinterpret_cast<const char *>(&count), sizeof count);
    for (const auto &b : const_cast<LocNet *>(this)->parameters())
        out.write(reinterpret_cast<const char *>(b.value), std::streamsize(b.size * sizeof(double)));

    auto j = spec_.to_json();
    j["format_version"] = kWeightVersion;
    j["parameter_count"] = count;
    std::ofstream js(desc);
    js << j.dump(2) << '\n';
    if (!out || !js)
        throw std::runtime_error("checkpoint write failed: " + stem.string());
}

LocNet LocNet::load(const std::filesystem::path &stem)
{
    auto bin = stem;
    bin += ".bin";
    auto desc = stem;
    desc += ".json";
    std::ifstream js(desc);
    if (!js)
        throw std::runtime_error("cannot open " + desc.string());
    LocNet net(LocNetSpec::from_json(nlohmann::json::parse(js)));

    std::ifstream in(bin, std::ios::binary);
    std::array<char, 4> magic{};
    std::uint32_t version = 0;
    std::uint64_t count = 0;
    in.read(magic.data(), 4);
    in.read(reinterpret_cast<char *>(&version), sizeof version);
    in.read(reinterpret_cast<char *>(&count), sizeof count);
    if (!in || magic != kWeightMagic || version != kWeightVersion)
        throw std::runtime_error(bin.string() + ": not a version " + std::to_string(kWeightVersion) + " weight file");
    if (count != net.parameter_count())
        throw std::runtime_error(bin.string() + ": weight count " + std::to_string(count) + " does not match descriptor (" +
                                 std::to_string(net.parameter_count()) + ")");
    for (auto &b : net.parameters())
        in.read(reinterpret_cast<char *>(b.value), std::streamsize(b.size * sizeof(double)));
    if (!in)
        throw std::runtime_error(bin.string() + ": truncated weight file");
    return net;
}

Tensor distance_loss_grad(const ForwardResult &out, const Vec2 &truth, int n, double weight)
{
    const Vec2 diff(out.estimate.x - truth.x(), out.estimate.y - truth.y());
    const double norm = diff.norm();
    Tensor dh(1, Eigen::Index(n) * n);
    if (norm < 1e-12)
    {
        dh.setZero();
        return dh;
    }
    const Vec2 g = weight * diff / norm;
    center_of_mass_backward(out.estimate, n, g.x(), g.y(), std::span<double>(dh.data(), std::size_t(dh.size())));
    return dh;
}

} // namespace radioloc
