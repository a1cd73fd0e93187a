#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nqs/error.hpp"

namespace nqs {

using cplx = std::complex<double>;

inline constexpr int kMaxSites = 30;

/// One computational basis state of L spin-1/2 sites.
///
/// Bit j (0-based) set means σ_{j+1} = +1, cleared means σ_{j+1} = -1.
/// Public site indices are 1-based.
class SpinConfig {
public:
    SpinConfig() = default;
    SpinConfig(std::uint32_t bits, int length) : bits_(bits), length_(length) {
        detail::require(length >= 1 && length <= kMaxSites, "SpinConfig: length must be in [1, 30]");
        detail::require(length == 32 || (bits >> length) == 0, "SpinConfig: bits out of range");
    }

    /// Configuration from a ±1 vector (σ_1 first).
    static SpinConfig from_spins(const std::vector<int>& spins) {
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < spins.size(); ++j) {
            detail::require(spins[j] == 1 || spins[j] == -1, "SpinConfig: spins must be ±1");
            if (spins[j] == 1) bits |= (1u << j);
        }
        return {bits, static_cast<int>(spins.size())};
    }

    static SpinConfig all_up(int length) {
        return {length >= 32 ? ~0u : ((1u << length) - 1u), length};
    }

    [[nodiscard]] std::uint32_t bits() const noexcept { return bits_; }
    [[nodiscard]] int length() const noexcept { return length_; }

    /// σ_j for 1 ≤ j ≤ L.
    [[nodiscard]] int spin(int j) const {
        detail::require(j >= 1 && j <= length_, "SpinConfig::spin: site out of range");
        return spin0(j - 1);
    }
    /// σ at 0-based storage index; no range check.
    [[nodiscard]] int spin0(int j) const noexcept { return ((bits_ >> j) & 1u) ? 1 : -1; }

    [[nodiscard]] SpinConfig flipped(int j) const {
        detail::require(j >= 1 && j <= length_, "SpinConfig::flipped: site out of range");
        return {bits_ ^ (1u << (j - 1)), length_};
    }

    /// Cyclic shift: result σ'_j = σ_{j+n} (indices mod L).
    [[nodiscard]] SpinConfig rotated(int n) const {
        n %= length_;
        if (n < 0) n += length_;
        if (n == 0) return *this;
        const std::uint32_t mask = (length_ >= 32) ? ~0u : ((1u << length_) - 1u);
        const std::uint32_t r = ((bits_ >> n) | (bits_ << (length_ - n))) & mask;
        return {r, length_};
    }

    [[nodiscard]] int magnetization() const noexcept {
        return 2 * __builtin_popcount(bits_) - length_;
    }

    [[nodiscard]] std::vector<int> spins() const {
        std::vector<int> out(length_);
        for (int j = 0; j < length_; ++j) out[j] = spin0(j);
        return out;
    }

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

private:
    std::uint32_t bits_ = 0;
    int length_ = 1;
};

/// |j - jc| reduced on the ring: min(m, L - m). Sites are 1-based.
inline int circ_distance(int j, int jc, int L) {
    detail::require(L >= 1, "circ_distance: L must be positive");
    detail::require(j >= 1 && j <= L && jc >= 1 && jc <= L, "circ_distance: site index out of range");
    const int m = j > jc ? j - jc : jc - j;
    return m < L - m ? m : L - m;
}

/// Tensor product of single-site Paulis, label 0/1/2/3 = I/x/y/z per site.
class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
        detail::require(!labels_.empty() && labels_.size() <= kMaxSites, "PauliString: length must be in [1, 30]");
        for (auto m : labels_) detail::require(m <= 3, "PauliString: labels must be in {0,1,2,3}");
    }

    static PauliString identity(int L) {
        return PauliString(std::vector<std::uint8_t>(static_cast<std::size_t>(L), 0));
    }

    /// Parses "IXYZ"-style strings (case insensitive), site 1 first.
    static PauliString parse(std::string_view text) {
        std::vector<std::uint8_t> labels;
        for (char c : text) {
            switch (c) {
                case 'I': case 'i': case '0': labels.push_back(0); break;
                case 'X': case 'x': case '1': labels.push_back(1); break;
                case 'Y': case 'y': case '2': labels.push_back(2); break;
                case 'Z': case 'z': case '3': labels.push_back(3); break;
                default: throw ArgumentError("PauliString::parse: unexpected character");
            }
        }
        return PauliString(std::move(labels));
    }

    /// Identity except label m at each listed 1-based site.
    static PauliString on_sites(int L, std::initializer_list<std::pair<int, int>> ops) {
        auto p = identity(L);
        for (auto [site, m] : ops) {
            detail::require(site >= 1 && site <= L, "PauliString::on_sites: site out of range");
            detail::require(m >= 0 && m <= 3, "PauliString::on_sites: label out of range");
            p.labels_[site - 1] = static_cast<std::uint8_t>(m);
        }
        return p;
    }

    [[nodiscard]] int length() const noexcept { return static_cast<int>(labels_.size()); }
    [[nodiscard]] int label(int j) const { return labels_.at(j - 1); }
    [[nodiscard]] const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

    [[nodiscard]] std::string str() const {
        static constexpr char names[] = {'I', 'X', 'Y', 'Z'};
        std::string s;
        for (auto m : labels_) s.push_back(names[m]);
        return s;
    }

private:
    std::vector<std::uint8_t> labels_;
};

/// The unique s' with ⟨s'|B|s⟩ ≠ 0, and that matrix element (modulus 1).
///
/// σ^y convention: ⟨-1|σ^y|+1⟩ = i, ⟨+1|σ^y|-1⟩ = -i.
inline std::pair<SpinConfig, cplx> apply_pauli(const PauliString& B, const SpinConfig& s) {
    detail::require(B.length() == s.length(), "apply_pauli: length mismatch");
    std::uint32_t bits = s.bits();
    int re_sign = 1;  // accumulated real sign
    int i_power = 0;  // accumulated power of i
    for (int j = 0; j < s.length(); ++j) {
        const int sigma = s.spin0(j);
        switch (B.labels()[j]) {
            case 1: bits ^= (1u << j); break;
            case 2:
                bits ^= (1u << j);
                i_power += 1;
                if (sigma == -1) re_sign = -re_sign;
                break;
            case 3:
                if (sigma == -1) re_sign = -re_sign;
                break;
            default: break;
        }
    }
    static constexpr cplx powers[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {SpinConfig(bits, s.length()), static_cast<double>(re_sign) * powers[i_power % 4]};
}

/// Forward range over all 2^L basis states in ascending bitmask order.
class BasisRange {
public:
    class iterator {
    public:
        using value_type = SpinConfig;
        using difference_type = std::ptrdiff_t;
        iterator() = default;
        iterator(std::uint64_t i, int L) : i_(i), L_(L) {}
        SpinConfig operator*() const { return {static_cast<std::uint32_t>(i_), L_}; }
        iterator& operator++() { ++i_; return *this; }
        iterator operator++(int) { auto t = *this; ++i_; return t; }
        bool operator==(const iterator& o) const { return i_ == o.i_; }
    private:
        std::uint64_t i_ = 0;
        int L_ = 1;
    };

    explicit BasisRange(int L) : L_(L) {}
    [[nodiscard]] iterator begin() const { return {0, L_}; }
    [[nodiscard]] iterator end() const { return {std::uint64_t{1} << L_, L_}; }
    [[nodiscard]] std::uint64_t size() const { return std::uint64_t{1} << L_; }

private:
    int L_;
};

inline BasisRange enumerate_basis(int L) {
    if (L > kMaxSites) throw CapacityError("enumerate_basis: L exceeds 30");
    detail::require(L >= 1, "enumerate_basis: L must be positive");
    return BasisRange(L);
}

}  // namespace nqs
