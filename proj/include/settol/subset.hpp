#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "settol/errors.hpp"

namespace settol {

/// A set of ground-set element indices, stored as a 64-bit mask. Ground sets
/// are capped at 64 elements everywhere in this library.
class Subset {
public:
    static constexpr std::size_t max_elements = 64;

    constexpr Subset() = default;

    static constexpr Subset of_bits(std::uint64_t bits) { return Subset(bits); }

    static Subset single(std::size_t index) {
        check_index(index);
        return Subset(std::uint64_t{1} << index);
    }

    /// The full ground set {0, ..., m-1}.
    static Subset full(std::size_t m) {
        if (m > max_elements) throw usage_error("ground set larger than 64 elements");
        if (m == max_elements) return Subset(~std::uint64_t{0});
        return Subset((std::uint64_t{1} << m) - 1);
    }

    static Subset of(std::initializer_list<std::size_t> indices) {
        Subset s;
        for (std::size_t i : indices) s = s.with(i);
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

    constexpr bool contains(std::size_t index) const {
        return index < max_elements && (bits_ >> index & 1u) != 0;
    }

    Subset with(std::size_t index) const {
        check_index(index);
        return Subset(bits_ | (std::uint64_t{1} << index));
    }

    Subset without(std::size_t index) const {
        check_index(index);
        return Subset(bits_ & ~(std::uint64_t{1} << index));
    }

    constexpr Subset operator|(Subset o) const { return Subset(bits_ | o.bits_); }
    constexpr Subset operator&(Subset o) const { return Subset(bits_ & o.bits_); }
    constexpr Subset operator-(Subset o) const { return Subset(bits_ & ~o.bits_); }

    Subset complement_in(std::size_t m) const { return full(m) - *this; }

    constexpr bool is_subset_of(Subset o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(Subset o) const { return (bits_ & o.bits_) != 0; }

    friend constexpr auto operator<=>(Subset, Subset) = default;

    /// Element indices in ascending order.
    std::vector<std::size_t> elements() const {
        std::vector<std::size_t> out;
        out.reserve(size());
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
        return out;
    }

    /// Visits every F with F subset-of *this, in ascending mask order
    /// (starts at the empty set, ends at *this).
    template <class Visitor>
    void for_each_subset(Visitor&& visit) const {
        std::uint64_t sub = 0;
        while (true) {
            visit(Subset(sub));
            if (sub == bits_) break;
            sub = (sub - bits_) & bits_;
        }
    }

    std::vector<Subset> subsets() const {
        std::vector<Subset> out;
        for_each_subset([&](Subset f) { out.push_back(f); });
        return out;
    }

private:
    constexpr explicit Subset(std::uint64_t bits) : bits_(bits) {}

    static void check_index(std::size_t index) {
        if (index >= max_elements) throw usage_error("element index exceeds 63");
    }

    std::uint64_t bits_ = 0;
};

} // namespace settol
