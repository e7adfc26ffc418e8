#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ppacdc {

// Signed grid index. Levels relative to a b-bit grid live in
// [-(2^(b-1)-1), +(2^(b-1)-1)]; the two's-complement code -2^(b-1) is
// reserved-invalid so every payload is exactly b bits wide.
using QuantLevel = std::int64_t;

// The shared network-wide quantization grid: b bits, step delta, midpoint
// sigma. All agents hold an identical copy at every round.
struct QuantizerParams {
    int bits = 12;
    double step = 1.0;
    double midpoint = 0.0;

    void validate() const;  // throws std::invalid_argument

    bool operator==(const QuantizerParams&) const = default;
};

// Largest representable level magnitude, 2^(b-1) - 1.
QuantLevel max_level(int bits);

// Half-width of the representable range, (2^(b-1) - 1/2) * step.
double range_limit(const QuantizerParams& p);

// Nearest-grid index of x with saturation clamping. Rounding ties go half
// away from zero. This is the integer core of quantize(); the protocol uses
// it directly so a value is quantized exactly once per round.
QuantLevel quantize_level(double x, const QuantizerParams& p);

// midpoint + level * step of the nearest representable grid point, i.e.
// from_level(quantize_level(x, p), p).
double quantize(double x, const QuantizerParams& p);

// Recovers the grid index of an on-grid value q. Off-grid or out-of-range
// input throws: it means sender and receiver grids have drifted apart, which
// is a protocol bug, not a rounding matter.
QuantLevel to_level(double q, const QuantizerParams& p);

double from_level(QuantLevel level, const QuantizerParams& p);

// --- bit-level codec ------------------------------------------------------
//
// Wire encoding used by the protocol: fields are written MSB-first into a
// byte stream, the trailing byte zero-padded. Levels travel as bits_each-bit
// two's-complement codes.

class BitWriter {
public:
    // Appends the low `nbits` bits of `value`, most significant bit first.
    void put(std::uint64_t value, int nbits);

    std::size_t bit_size() const { return bits_; }
    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Reads `nbits` bits MSB-first as an unsigned value. Throws on underrun.
    std::uint64_t get(int nbits);

    std::size_t bits_consumed() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Sign-extends a bits-wide two's-complement code.
std::int64_t sign_extend(std::uint64_t code, int bits);

std::vector<std::uint8_t> pack_levels(std::span<const QuantLevel> levels, int bits_each);
std::vector<QuantLevel> unpack_levels(std::span<const std::uint8_t> bytes,
                                      std::size_t count, int bits_each);

}  // namespace ppacdc
