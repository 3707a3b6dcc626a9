#include "isac/pas.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "isac/random.hpp"

namespace isac::pas {

namespace mp = boost::multiprecision;

std::uint32_t Composition::length() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return static_cast<std::uint32_t>(s);
}

void Composition::validate() const {
    if (counts.empty()) throw std::invalid_argument("composition needs at least one level");
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    if (s == 0) throw std::invalid_argument("composition of an empty block");
    if (s > 65535) throw std::invalid_argument("block length above 65535");
}

namespace {

constexpr std::uint64_t kSmall = std::numeric_limits<std::uint64_t>::max() / 2;

// multinomial in 64 bits when it stays below kSmall
bool small_multinomial(const Composition& comp, std::uint64_t& out) {
    unsigned __int128 m = 1;
    std::uint32_t n = 0;
    for (auto c : comp.counts)
        for (std::uint32_t i = 1; i <= c; ++i) {
            ++n;
            m = m * n / i;
            if (m > kSmall) return false;
        }
    out = static_cast<std::uint64_t>(m);
    return true;
}

}  // namespace

BigInt multinomial(const Composition& comp) {
    comp.validate();
    std::uint64_t small = 0;
    if (small_multinomial(comp, small)) return BigInt(small);
    BigInt m = 1;
    std::uint32_t n = 0;
    for (auto c : comp.counts)
        for (std::uint32_t i = 1; i <= c; ++i) {
            ++n;
            m = m * n / i;  // running product of binomials, exact at every step
        }
    return m;
}

std::size_t ccdm_payload_bits(const Composition& comp) {
    comp.validate();
    std::uint64_t small = 0;
    if (small_multinomial(comp, small)) return static_cast<std::size_t>(std::bit_width(small) - 1);
    const BigInt m = multinomial(comp);
    return m == 0 ? 0 : mp::msb(m);
}

double ccdm_rate(const Composition& comp) {
    return static_cast<double>(ccdm_payload_bits(comp)) / static_cast<double>(comp.length());
}

Composition quantize_composition(std::span<const double> probs, std::uint32_t U) {
    if (probs.empty() || U == 0) throw std::invalid_argument("empty distribution or block");
    double s = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
        s += p;
    }
    if (!(s > 0.0)) throw std::invalid_argument("probabilities sum to zero");
    Composition comp;
    comp.counts.resize(probs.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::uint32_t used = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double t = U * probs[i] / s;
        comp.counts[i] = static_cast<std::uint32_t>(std::floor(t));
        used += comp.counts[i];
        rem.emplace_back(-(t - std::floor(t)), i);
    }
    std::stable_sort(rem.begin(), rem.end());
    for (std::size_t j = 0; used < U; ++j, ++used) ++comp.counts[rem[j % rem.size()].second];
    return comp;
}

namespace {

// M * c / n, exact (n divides M * c by construction)
inline std::uint64_t mul_div(std::uint64_t m, std::uint64_t c, std::uint64_t n) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(m) * c / n);
}
inline BigInt mul_div(const BigInt& m, std::uint64_t c, std::uint64_t n) { return m * c / n; }

template <class T>
std::vector<std::uint32_t> unrank(T r, T total, std::vector<std::uint32_t> cnt, std::uint32_t n) {
    std::vector<std::uint32_t> seq;
    seq.reserve(n);
    T m = total;
    for (std::uint32_t left = n; left > 0; --left) {
        for (std::uint32_t l = 0; l < cnt.size(); ++l) {
            if (cnt[l] == 0) continue;
            const T t = mul_div(m, cnt[l], left);
            if (r < t) {
                seq.push_back(l);
                --cnt[l];
                m = t;
                break;
            }
            r -= t;
        }
    }
    return seq;
}

template <class T>
T rank(std::span<const std::uint32_t> seq, T total, std::vector<std::uint32_t> cnt) {
    T r = 0;
    T m = total;
    std::uint32_t left = static_cast<std::uint32_t>(seq.size());
    for (auto s : seq) {
        for (std::uint32_t l = 0; l < s; ++l)
            if (cnt[l] > 0) r += mul_div(m, cnt[l], left);
        m = mul_div(m, cnt[s], left);
        --cnt[s];
        --left;
    }
    return r;
}

void check_bits(const Bits& b) {
    for (auto v : b)
        if (v > 1) throw std::invalid_argument("bit values must be 0 or 1");
}

}  // namespace

std::vector<std::uint32_t> ccdm_encode(const Bits& bits, const Composition& comp) {
    comp.validate();
    const std::size_t k = ccdm_payload_bits(comp);
    if (bits.size() != k)
        throw std::invalid_argument("matcher payload must be " + std::to_string(k) + " bits, got " +
                                    std::to_string(bits.size()));
    check_bits(bits);
    const std::uint32_t n = comp.length();
    std::uint64_t small = 0;
    if (small_multinomial(comp, small)) {
        std::uint64_t r = 0;
        for (auto b : bits) r = (r << 1) | b;
        return unrank<std::uint64_t>(r, small, comp.counts, n);
    }
    const BigInt total = multinomial(comp);
    BigInt r = 0;
    for (auto b : bits) r = (r << 1) | b;
    return unrank<BigInt>(r, total, comp.counts, n);
}

Bits ccdm_decode(std::span<const std::uint32_t> amplitudes, const Composition& comp) {
    comp.validate();
    const std::size_t k = ccdm_payload_bits(comp);
    std::vector<std::uint32_t> seen(comp.counts.size(), 0);
    for (auto a : amplitudes) {
        if (a >= comp.counts.size()) throw std::invalid_argument("amplitude level outside the composition");
        ++seen[a];
    }
    if (seen != comp.counts) throw std::invalid_argument("sequence does not match the composition");
    Bits out(k);
    std::uint64_t small = 0;
    if (small_multinomial(comp, small)) {
        const std::uint64_t r = rank<std::uint64_t>(amplitudes, small, comp.counts);
        if (k < 64 && (r >> k) != 0) throw std::invalid_argument("sequence is not a matcher codeword");
        for (std::size_t i = 0; i < k; ++i) out[i] = static_cast<std::uint8_t>((r >> (k - 1 - i)) & 1u);
        return out;
    }
    const BigInt r = rank<BigInt>(amplitudes, multinomial(comp), comp.counts);
    if ((r >> k) != 0) throw std::invalid_argument("sequence is not a matcher codeword");
    for (std::size_t i = 0; i < k; ++i) out[i] = mp::bit_test(r, static_cast<unsigned>(k - 1 - i)) ? 1 : 0;
    return out;
}

Bits systematic_parity(const Bits& info, const SystematicCode& code) {
    if (info.size() != code.k)
        throw std::invalid_argument("code expects " + std::to_string(code.k) + " information bits, got " +
                                    std::to_string(info.size()));
    check_bits(info);
    const std::size_t words = (code.k + 63) / 64;
    std::vector<std::uint64_t> packed(words, 0);
    for (std::size_t i = 0; i < code.k; ++i)
        if (info[i]) packed[i / 64] |= std::uint64_t{1} << (i % 64);
    Bits parity(code.n_parity);
    for (std::size_t j = 0; j < code.n_parity; ++j) {
        Rng rng(derive_seed(code.seed, j));
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t row = rng();
            if (w + 1 == words && code.k % 64) row &= (std::uint64_t{1} << (code.k % 64)) - 1;
            acc ^= row & packed[w];
        }
        parity[j] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return parity;
}

std::string to_string(PasFamily f) { return f == PasFamily::cpas ? "cpas" : "gpas"; }

void PasConfig::validate() const {
    comp.validate();
    if (amp_bits < 1 || amp_bits > 8) throw std::invalid_argument("amplitude bits must lie in [1, 8]");
    if (comp.counts.size() != (std::size_t{1} << amp_bits))
        throw std::invalid_argument("composition needs " + std::to_string(1u << amp_bits) + " levels");
    if (comp.length() != U) throw std::invalid_argument("composition length differs from U");
    if (family == PasFamily::cpas && phase_bits != 1) throw std::invalid_argument("cpas carries one sign bit");
    if (family == PasFamily::gpas && (phase_bits < 1 || phase_bits > 8))
        throw std::invalid_argument("phase bits must lie in [1, 8]");
    if (bypass > static_cast<std::size_t>(U) * phase_bits)
        throw std::invalid_argument("more bypass bits than sign/phase positions");
}

std::size_t PasConfig::dm_bits() const { return ccdm_payload_bits(comp); }
std::size_t PasConfig::info_bits() const { return streams() * (dm_bits() + bypass); }
std::size_t PasConfig::parity_bits() const { return static_cast<std::size_t>(U) * phase_bits - bypass; }
int PasConfig::bits_per_symbol() const {
    return family == PasFamily::cpas ? 2 * (amp_bits + 1) : amp_bits + phase_bits;
}
SystematicCode PasConfig::code() const {
    return {static_cast<std::size_t>(U) * amp_bits + bypass, parity_bits(), code_seed};
}
double PasConfig::fec_rate() const {
    const auto c = code();
    return static_cast<double>(c.k) / static_cast<double>(c.k + c.n_parity);
}

namespace {

std::uint32_t amp_label(const PasConfig& cfg, std::uint32_t a) {
    if (cfg.family == PasFamily::gpas) return gray(a);
    const std::uint32_t half = std::uint32_t{1} << cfg.amp_bits;
    return gray(half - 1 - a);
}

std::uint32_t amp_from_label(const PasConfig& cfg, std::uint32_t lab) {
    if (cfg.family == PasFamily::gpas) return gray_inverse(lab);
    const std::uint32_t half = std::uint32_t{1} << cfg.amp_bits;
    return half - 1 - gray_inverse(lab);
}

// 1-D ASK label: sign bit (1 = positive) followed by the amplitude label
std::uint32_t ask_label(const PasConfig& cfg, std::uint32_t a, std::uint8_t sign) {
    const std::uint32_t half = std::uint32_t{1} << cfg.amp_bits;
    const std::uint32_t ir = sign ? half + a : half - 1 - a;
    return gray(ir);
}

void check_grid(const PasConfig& cfg, const Constellation& c) {
    if (c.bits() != cfg.bits_per_symbol())
        throw std::invalid_argument("constellation carries " + std::to_string(c.bits()) + " bits, frame needs " +
                                    std::to_string(cfg.bits_per_symbol()));
}

void push_word(Bits& out, std::uint32_t w, int nbits) {
    for (int b = nbits - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((w >> b) & 1u));
}

std::uint32_t read_word(const Bits& in, std::size_t pos, int nbits) {
    std::uint32_t w = 0;
    for (int b = 0; b < nbits; ++b) w = (w << 1) | in[pos + b];
    return w;
}

}  // namespace

PasFrame pas_encode(const PasConfig& cfg, const Bits& info, const Constellation& c) {
    cfg.validate();
    check_grid(cfg, c);
    if (info.size() != cfg.info_bits())
        throw std::invalid_argument("frame needs " + std::to_string(cfg.info_bits()) + " information bits, got " +
                                    std::to_string(info.size()));
    check_bits(info);
    PasFrame f;
    f.config = cfg;
    f.info = info;
    const std::size_t kd = cfg.dm_bits();
    const auto code = cfg.code();
    std::size_t pos = 0;
    for (std::size_t s = 0; s < cfg.streams(); ++s) {
        const Bits payload(info.begin() + pos, info.begin() + pos + kd);
        pos += kd;
        const Bits by(info.begin() + pos, info.begin() + pos + cfg.bypass);
        pos += cfg.bypass;
        auto amps = ccdm_encode(payload, cfg.comp);
        Bits fec_in;
        fec_in.reserve(code.k);
        for (auto a : amps) push_word(fec_in, amp_label(cfg, a), cfg.amp_bits);
        fec_in.insert(fec_in.end(), by.begin(), by.end());
        auto par = systematic_parity(fec_in, code);
        Bits signs = by;
        signs.insert(signs.end(), par.begin(), par.end());
        f.amplitudes.push_back(std::move(amps));
        f.parity.push_back(std::move(par));
        f.sign_bits.push_back(std::move(signs));
    }
    f.labels.resize(cfg.U);
    f.symbols.resize(cfg.U);
    for (std::uint32_t u = 0; u < cfg.U; ++u) {
        std::uint32_t lab;
        if (cfg.family == PasFamily::gpas) {
            const std::uint32_t ph = read_word(f.sign_bits[0], static_cast<std::size_t>(u) * cfg.phase_bits, cfg.phase_bits);
            lab = (amp_label(cfg, f.amplitudes[0][u]) << cfg.phase_bits) | ph;
        } else {
            const std::uint32_t re = ask_label(cfg, f.amplitudes[0][u], f.sign_bits[0][u]);
            const std::uint32_t im = ask_label(cfg, f.amplitudes[1][u], f.sign_bits[1][u]);
            lab = (re << (cfg.amp_bits + 1)) | im;
        }
        f.labels[u] = lab;
        f.symbols[u] = c.points()[c.index_of_label(lab)];
    }
    return f;
}

Bits pas_decode(const PasConfig& cfg, std::span<const cplx> symbols, const Constellation& c) {
    cfg.validate();
    check_grid(cfg, c);
    if (symbols.size() != cfg.U) throw std::invalid_argument("frame needs U symbols");
    const std::size_t S = cfg.streams();
    std::vector<std::vector<std::uint32_t>> amps(S, std::vector<std::uint32_t>(cfg.U));
    std::vector<Bits> signs(S);
    const std::uint32_t amask = (std::uint32_t{1} << cfg.amp_bits) - 1;
    for (std::uint32_t u = 0; u < cfg.U; ++u) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double d = std::norm(symbols[u] - c.points()[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        const std::uint32_t lab = c.labels()[best];
        if (cfg.family == PasFamily::gpas) {
            amps[0][u] = amp_from_label(cfg, lab >> cfg.phase_bits);
            push_word(signs[0], lab & ((std::uint32_t{1} << cfg.phase_bits) - 1), cfg.phase_bits);
        } else {
            const int half = cfg.amp_bits + 1;
            const std::uint32_t parts[2] = {lab >> half, lab & ((std::uint32_t{1} << half) - 1)};
            for (std::size_t s = 0; s < 2; ++s) {
                signs[s].push_back(static_cast<std::uint8_t>(parts[s] >> cfg.amp_bits));
                amps[s][u] = amp_from_label(cfg, parts[s] & amask);
            }
        }
    }
    Bits info;
    info.reserve(cfg.info_bits());
    for (std::size_t s = 0; s < S; ++s) {
        const auto payload = ccdm_decode(amps[s], cfg.comp);
        info.insert(info.end(), payload.begin(), payload.end());
        info.insert(info.end(), signs[s].begin(), signs[s].begin() + static_cast<std::ptrdiff_t>(cfg.bypass));
    }
    return info;
}

std::vector<std::uint8_t> write_frame(const PasConfig& cfg, const Bits& info) {
    cfg.validate();
    if (info.size() != cfg.info_bits()) throw std::invalid_argument("information bit count mismatch");
    check_bits(info);
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(cfg.family));
    out.push_back(static_cast<std::uint8_t>(cfg.U >> 8));
    out.push_back(static_cast<std::uint8_t>(cfg.U & 0xff));
    out.push_back(static_cast<std::uint8_t>(cfg.amp_bits));
    out.push_back(static_cast<std::uint8_t>(cfg.phase_bits));
    for (auto c : cfg.comp.counts) {
        out.push_back(static_cast<std::uint8_t>(c >> 8));
        out.push_back(static_cast<std::uint8_t>(c & 0xff));
    }
    std::uint8_t cur = 0;
    int fill = 0;
    for (auto b : info) {
        cur = static_cast<std::uint8_t>((cur << 1) | b);
        if (++fill == 8) {
            out.push_back(cur);
            cur = 0;
            fill = 0;
        }
    }
    if (fill) out.push_back(static_cast<std::uint8_t>(cur << (8 - fill)));
    return out;
}

std::pair<PasConfig, Bits> read_frame(std::span<const std::uint8_t> bytes, std::size_t bypass,
                                      std::uint64_t code_seed) {
    if (bytes.size() < 5) throw std::invalid_argument("frame shorter than its header");
    PasConfig cfg;
    if (bytes[0] > 1) throw std::invalid_argument("unknown frame family " + std::to_string(bytes[0]));
    cfg.family = static_cast<PasFamily>(bytes[0]);
    cfg.U = (std::uint32_t{bytes[1]} << 8) | bytes[2];
    cfg.amp_bits = bytes[3];
    cfg.phase_bits = bytes[4];
    if (cfg.amp_bits < 1 || cfg.amp_bits > 8) throw std::invalid_argument("amplitude bits must lie in [1, 8]");
    const std::size_t levels = std::size_t{1} << cfg.amp_bits;
    const std::size_t head = 5 + 2 * levels;
    if (bytes.size() < head) throw std::invalid_argument("frame shorter than its header");
    for (std::size_t l = 0; l < levels; ++l)
        cfg.comp.counts.push_back((std::uint32_t{bytes[5 + 2 * l]} << 8) | bytes[6 + 2 * l]);
    cfg.bypass = bypass;
    cfg.code_seed = code_seed;
    cfg.validate();
    const std::size_t nbits = cfg.info_bits();
    if (bytes.size() != head + (nbits + 7) / 8)
        throw std::invalid_argument("frame payload length does not match its header");
    Bits info(nbits);
    for (std::size_t i = 0; i < nbits; ++i) info[i] = (bytes[head + i / 8] >> (7 - i % 8)) & 1u;
    for (std::size_t i = nbits; i < 8 * (bytes.size() - head); ++i)
        if ((bytes[head + i / 8] >> (7 - i % 8)) & 1u) throw std::invalid_argument("non-zero padding bits");
    return {cfg, info};
}

std::size_t LlrLutSet::stored_values() const {
    std::size_t s = 0;
    for (const auto& t : tables) s += t.size();
    return s;
}

namespace {

constexpr int kAmpBits = 2;
constexpr int kPhaseBits = 4;
constexpr std::size_t kAverageNodes = 256;

void check_lut_layout(const Constellation& c) {
    const std::uint32_t nph = 1u << kPhaseBits;
    bool ok = c.bits() == kAmpBits + kPhaseBits;
    for (std::uint32_t a = 0; ok && a < (1u << kAmpBits); ++a)
        for (std::uint32_t k = 0; ok && k < nph; ++k) {
            const std::size_t i = a * nph + k;
            const double want = std::numbers::pi * (2.0 * k + 1.0) / nph;
            ok = c.labels()[i] == ((gray(a) << kPhaseBits) | gpas_phase_label(k, nph)) &&
                 std::abs(std::arg(c.points()[i] * std::polar(1.0, -want))) < 1e-9;
        }
    if (!ok) throw std::invalid_argument("LUT demapper needs a gpas grid with 2 amplitude and 4 phase bits");
}

// linear interpolation on nodes lo + (hi-lo) v/(V-1), linear extrapolation outside
double interp(const std::vector<double>& t, double lo, double hi, double x) {
    const std::size_t V = t.size();
    const double pos = (x - lo) / (hi - lo) * static_cast<double>(V - 1);
    const double base = std::clamp(std::floor(pos), 0.0, static_cast<double>(V - 2));
    const std::size_t i = static_cast<std::size_t>(base);
    const double f = pos - base;
    return t[i] + f * (t[i + 1] - t[i]);
}

// periodic nodes 2pi v / V
double interp_phase(const std::vector<double>& t, double theta) {
    const std::size_t V = t.size();
    double pos = theta / (2.0 * std::numbers::pi) * static_cast<double>(V);
    pos -= static_cast<double>(V) * std::floor(pos / static_cast<double>(V));
    std::size_t i = static_cast<std::size_t>(pos);
    if (i >= V) i = V - 1;
    const double f = pos - static_cast<double>(i);
    return t[i] + f * (t[(i + 1) % V] - t[i]);
}

}  // namespace

LlrLutSet build_llr_luts(const Constellation& c, double sigma_c2, std::size_t V, double g, LutBuildInfo* info) {
    check_lut_layout(c);
    if (V < 4) throw std::invalid_argument("tables need at least 4 entries");
    if (!(g > 0.0)) throw std::invalid_argument("averaging span must be positive");
    const air::AwgnChannel ch(sigma_c2);
    LlrLutSet L;
    L.V = V;
    L.g = g;
    L.r_max = 2.0;
    L.axis_max = 2.0;
    for (auto& t : L.tables) t.assign(V, 0.0);
    const double Q = static_cast<double>(kAverageNodes);
    auto node = [V](double lo, double hi, std::size_t v) { return lo + (hi - lo) * static_cast<double>(v) / (V - 1); };

    for (std::size_t v = 0; v < V; ++v) {
        const double R = node(0.0, L.r_max, v);
        const double u = node(-L.axis_max, L.axis_max, v);
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (std::size_t q = 0; q < kAverageNodes; ++q) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(q) / Q;
            const auto lr = air::exact_llrs(c, std::polar(R, th), ch);
            s1 += lr[0];
            s2 += lr[1];
            const double t = -g + 2.0 * g * (static_cast<double>(q) + 0.5) / Q;
            s3 += air::exact_llrs(c, cplx(u, t), ch)[2];
            s4 += air::exact_llrs(c, cplx(t, u), ch)[3];
        }
        L.tables[LlrLutSet::radius1][v] = s1 / Q;
        L.tables[LlrLutSet::radius2][v] = s2 / Q;
        L.tables[LlrLutSet::real3][v] = s3 / Q;
        L.tables[LlrLutSet::imag4][v] = s4 / Q;
    }

    // phase factors first: (1/g) int_0^g l(R, theta) dR
    for (std::size_t v = 0; v < V; ++v) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(V);
        double s5 = 0, s6 = 0;
        for (std::size_t q = 0; q < kAverageNodes; ++q) {
            const double R = g * (static_cast<double>(q) + 0.5) / Q;
            const auto lr = air::exact_llrs(c, std::polar(R, th), ch);
            s5 += lr[4];
            s6 += lr[5];
        }
        L.tables[LlrLutSet::phase5][v] = s5 / Q;
        L.tables[LlrLutSet::phase6][v] = s6 / Q;
    }

    // radial factors: mean of l / l_theta over phase bins with |l_theta| >= 1e-3
    std::vector<double> rad5(V), rad6(V);
    const auto& p5 = L.tables[LlrLutSet::phase5];
    const auto& p6 = L.tables[LlrLutSet::phase6];
    for (std::size_t v = 0; v < V; ++v) {
        const double R = node(0.0, L.r_max, v);
        double a5 = 0, a6 = 0;
        std::size_t n5 = 0, n6 = 0;
        for (std::size_t w = 0; w < V; ++w) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(w) / static_cast<double>(V);
            const bool use5 = std::abs(p5[w]) >= 1e-3, use6 = std::abs(p6[w]) >= 1e-3;
            if (!use5 && !use6) continue;
            const auto lr = air::exact_llrs(c, std::polar(R, th), ch);
            if (use5) {
                a5 += lr[4] / p5[w];
                ++n5;
            }
            if (use6) {
                a6 += lr[5] / p6[w];
                ++n6;
            }
        }
        rad5[v] = n5 ? a5 / static_cast<double>(n5) : 0.0;
        rad6[v] = n6 ? a6 / static_cast<double>(n6) : 0.0;
        L.tables[LlrLutSet::radius56][v] = 0.5 * (rad5[v] + rad6[v]);
    }
    if (info) {
        info->radial5 = std::move(rad5);
        info->radial6 = std::move(rad6);
    }
    return L;
}

void lut_demap(cplx y, const LlrLutSet& L, std::span<double> out) {
    if (out.size() < 6) throw std::invalid_argument("LUT demapper produces 6 LLRs");
    const double R = std::abs(y);
    const double th = std::atan2(y.imag(), y.real());
    const double rad = interp(L.tables[LlrLutSet::radius56], 0.0, L.r_max, R);
    out[0] = interp(L.tables[LlrLutSet::radius1], 0.0, L.r_max, R);
    out[1] = interp(L.tables[LlrLutSet::radius2], 0.0, L.r_max, R);
    out[2] = interp(L.tables[LlrLutSet::real3], -L.axis_max, L.axis_max, y.real());
    out[3] = interp(L.tables[LlrLutSet::imag4], -L.axis_max, L.axis_max, y.imag());
    out[4] = rad * interp_phase(L.tables[LlrLutSet::phase5], th);
    out[5] = rad * interp_phase(L.tables[LlrLutSet::phase6], th);
}

air::LlrVector lut_demap(cplx y, const LlrLutSet& L) {
    air::LlrVector l(6);
    lut_demap(y, L, l);
    return l;
}

std::vector<double> ring_probabilities(const Constellation& c, int amp_bits) {
    const std::size_t nr = std::size_t{1} << amp_bits;
    if (c.size() % nr) throw std::invalid_argument("constellation size is not a multiple of the ring count");
    const std::size_t nph = c.size() / nr;
    std::vector<double> q(nr, 0.0);
    for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t k = 0; k < nph; ++k) q[a] += c.probs()[a * nph + k];
    return q;
}

}  // namespace isac::pas
