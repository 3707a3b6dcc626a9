#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "isac/air.hpp"
#include "isac/constellation.hpp"

namespace isac::pas {

using Bits = std::vector<std::uint8_t>;
using BigInt = boost::multiprecision::cpp_int;

/// Occurrence count of each amplitude level in a block of U symbols.
struct Composition {
    std::vector<std::uint32_t> counts;
    std::uint32_t length() const;
    void validate() const;
};

BigInt multinomial(const Composition& comp);
/// floor(log2(multinomial)) bits.
std::size_t ccdm_payload_bits(const Composition& comp);
/// Payload bits per amplitude.
double ccdm_rate(const Composition& comp);

/// Counts nearest to U * probs (largest remainder) summing to U.
Composition quantize_composition(std::span<const double> probs, std::uint32_t U);

/// Constant-composition matcher: payload read MSB-first as the lexicographic rank of the sequence.
std::vector<std::uint32_t> ccdm_encode(const Bits& bits, const Composition& comp);
Bits ccdm_decode(std::span<const std::uint32_t> amplitudes, const Composition& comp);

/// Dense systematic GF(2) code: parity = G * info with a seeded random generator G.
struct SystematicCode {
    std::size_t k = 0;         ///< systematic (information) bits
    std::size_t n_parity = 0;  ///< parity bits
    std::uint64_t seed = 1;
};
Bits systematic_parity(const Bits& info, const SystematicCode& code);

enum class PasFamily : std::uint8_t { cpas = 0, gpas = 1 };
std::string to_string(PasFamily f);

/**
 * One PAS frame of U symbols.
 *
 * cpas: two ASK streams (real, imaginary), each with U amplitudes drawn by the
 * matcher from comp over 2^amp_bits levels and one sign bit per symbol.
 * gpas: U amplitudes with amp_bits label bits each and phase_bits phase bits.
 * Sign/phase bits are the bypass information bits followed by the parity bits.
 */
struct PasConfig {
    PasFamily family = PasFamily::gpas;
    std::uint32_t U = 64;
    int amp_bits = 2;
    int phase_bits = 4;  ///< 1 for cpas
    Composition comp;
    std::size_t bypass = 0;  ///< bypass information bits per stream
    std::uint64_t code_seed = 1;

    void validate() const;
    std::size_t streams() const { return family == PasFamily::cpas ? 2 : 1; }
    std::size_t dm_bits() const;         ///< per stream
    std::size_t info_bits() const;       ///< per frame
    std::size_t parity_bits() const;     ///< per stream
    int bits_per_symbol() const;         ///< M
    SystematicCode code() const;         ///< per stream
    double fec_rate() const;
};

struct PasFrame {
    PasConfig config;
    Bits info;
    std::vector<std::vector<std::uint32_t>> amplitudes;  ///< per stream
    std::vector<Bits> sign_bits;                         ///< per stream, U * phase_bits
    std::vector<Bits> parity;                            ///< per stream
    std::vector<std::uint32_t> labels;                   ///< per symbol
    std::vector<cplx> symbols;
};

/// c must be the matching grid: make_qam(2*(amp_bits+1)) or a gpas grid with the same bit split.
PasFrame pas_encode(const PasConfig& cfg, const Bits& info, const Constellation& c);
/// Noiseless inversion (nearest point): returns the information bits.
Bits pas_decode(const PasConfig& cfg, std::span<const cplx> symbols, const Constellation& c);

/// Binary frame: header {family 1B, U 2B, M_A 1B, M_phi 1B, counts 2B each} then the packed info bits.
std::vector<std::uint8_t> write_frame(const PasConfig& cfg, const Bits& info);
/// bypass and code_seed are not on the wire and come from the caller.
std::pair<PasConfig, Bits> read_frame(std::span<const std::uint8_t> bytes, std::size_t bypass,
                                      std::uint64_t code_seed = 1);

/// Seven 1-D LLR tables for the 2+4 bit GPAS layout.
struct LlrLutSet {
    enum Table { radius1, radius2, real3, imag4, radius56, phase5, phase6 };
    static constexpr std::size_t kTables = 7;
    std::size_t V = 256;
    double g = 2.0;
    double r_max = 2.0;
    double axis_max = 2.0;
    std::array<std::vector<double>, kTables> tables;
    std::size_t stored_values() const;
};

struct LutBuildInfo {
    std::vector<double> radial5;  ///< radial factor estimated from bit 5 alone
    std::vector<double> radial6;
};

LlrLutSet build_llr_luts(const Constellation& c, double sigma_c2, std::size_t V = 256, double g = 2.0,
                         LutBuildInfo* info = nullptr);
void lut_demap(cplx y, const LlrLutSet& luts, std::span<double> llrs);
air::LlrVector lut_demap(cplx y, const LlrLutSet& luts);

/// Amplitude-level probabilities of a gpas constellation (ring sums).
std::vector<double> ring_probabilities(const Constellation& c, int amp_bits);

}  // namespace isac::pas
