#include "ppacdc/quantizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ppacdc {

namespace {

constexpr int kMinBits = 2;
constexpr int kMaxBits = 32;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

void QuantizerParams::validate() const {
    if (bits < kMinBits || bits > kMaxBits)
        fail("quantizer bits must be in [" + std::to_string(kMinBits) + ", " +
             std::to_string(kMaxBits) + "], got " + std::to_string(bits));
    if (!(step > 0.0) || !std::isfinite(step)) fail("quantizer step must be positive and finite");
    if (!std::isfinite(midpoint)) fail("quantizer midpoint must be finite");
}

QuantLevel max_level(int bits) {
    if (bits < kMinBits || bits > kMaxBits) fail("max_level: bits out of range");
    return (QuantLevel{1} << (bits - 1)) - 1;
}

double range_limit(const QuantizerParams& p) {
    p.validate();
    return (static_cast<double>(QuantLevel{1} << (p.bits - 1)) - 0.5) * p.step;
}

QuantLevel quantize_level(double x, const QuantizerParams& p) {
    p.validate();
    if (!std::isfinite(x)) fail("quantize: non-finite input");
    const QuantLevel lmax = max_level(p.bits);
    const double xbar = range_limit(p);
    if (x >= p.midpoint + xbar) return lmax;
    if (x <= p.midpoint - xbar) return -lmax;
    // std::round ties half away from zero, keeping the grid symmetric about
    // the midpoint. The clamp absorbs the case where (x - sigma)/delta lands
    // on the saturation half-integer only through division rounding.
    double l = std::round((x - p.midpoint) / p.step);
    const double bound = static_cast<double>(lmax);
    if (l > bound) l = bound;
    if (l < -bound) l = -bound;
    return static_cast<QuantLevel>(l);
}

double quantize(double x, const QuantizerParams& p) {
    return from_level(quantize_level(x, p), p);
}

QuantLevel to_level(double q, const QuantizerParams& p) {
    p.validate();
    if (!std::isfinite(q)) fail("to_level: non-finite input");
    const double ratio = (q - p.midpoint) / p.step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, std::abs(ratio)))
        fail("to_level: value is off-grid (desynchronized quantizer grids?)");
    const QuantLevel l = static_cast<QuantLevel>(rounded);
    if (std::abs(l) > max_level(p.bits))
        fail("to_level: level " + std::to_string(l) + " out of range for " +
             std::to_string(p.bits) + " bits");
    return l;
}

double from_level(QuantLevel level, const QuantizerParams& p) {
    p.validate();
    if (std::abs(level) > max_level(p.bits))
        fail("from_level: level " + std::to_string(level) + " out of range for " +
             std::to_string(p.bits) + " bits");
    return p.midpoint + static_cast<double>(level) * p.step;
}

void BitWriter::put(std::uint64_t value, int nbits) {
    if (nbits < 0 || nbits > 64) fail("BitWriter::put: nbits out of range");
    for (int i = nbits - 1; i >= 0; --i) {
        if (bits_ % 8 == 0) buf_.push_back(0);
        const std::uint8_t bit = static_cast<std::uint8_t>((value >> i) & 1u);
        buf_.back() |= static_cast<std::uint8_t>(bit << (7 - bits_ % 8));
        ++bits_;
    }
}

std::uint64_t BitReader::get(int nbits) {
    if (nbits < 0 || nbits > 64) fail("BitReader::get: nbits out of range");
    if (pos_ + static_cast<std::size_t>(nbits) > bytes_.size() * 8)
        fail("BitReader::get: past end of stream");
    std::uint64_t v = 0;
    for (int i = 0; i < nbits; ++i) {
        const std::uint8_t byte = bytes_[pos_ / 8];
        v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
        ++pos_;
    }
    return v;
}

std::int64_t sign_extend(std::uint64_t code, int bits) {
    if (bits < 1 || bits > 64) fail("sign_extend: bits out of range");
    if (bits == 64) return static_cast<std::int64_t>(code);
    const std::uint64_t sign = std::uint64_t{1} << (bits - 1);
    if (code & sign) code |= ~((std::uint64_t{1} << bits) - 1);
    return static_cast<std::int64_t>(code);
}

std::vector<std::uint8_t> pack_levels(std::span<const QuantLevel> levels, int bits_each) {
    if (bits_each < 1 || bits_each > kMaxBits) fail("pack_levels: bits_each out of range");
    const QuantLevel lo = -(QuantLevel{1} << (bits_each - 1));
    const QuantLevel hi = (QuantLevel{1} << (bits_each - 1)) - 1;
    BitWriter w;
    for (QuantLevel l : levels) {
        if (l < lo || l > hi)
            fail("pack_levels: level " + std::to_string(l) + " does not fit in " +
                 std::to_string(bits_each) + " bits");
        w.put(static_cast<std::uint64_t>(l) & ((std::uint64_t{1} << bits_each) - 1), bits_each);
    }
    return w.take();
}

std::vector<QuantLevel> unpack_levels(std::span<const std::uint8_t> bytes,
                                      std::size_t count, int bits_each) {
    if (bits_each < 1 || bits_each > kMaxBits) fail("unpack_levels: bits_each out of range");
    BitReader r(bytes);
    std::vector<QuantLevel> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(sign_extend(r.get(bits_each), bits_each));
    return out;
}

}  // namespace ppacdc
