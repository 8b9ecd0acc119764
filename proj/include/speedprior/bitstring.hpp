#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace speedprior {

/// Finite binary string, stored as ASCII '0'/'1'.
///
/// Programs, outputs and observed prefixes all use this type. The text form
/// is the wire format used by every file and CLI argument.
class BitString {
public:
    BitString() = default;

    /// Throws std::invalid_argument on any character other than '0'/'1'.
    explicit BitString(std::string_view text);

    static BitString from_bits(unsigned value, std::size_t width);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    bool operator[](std::size_t i) const noexcept { return bits_[i] == '1'; }

    void push_back(bool bit) { bits_.push_back(bit ? '1' : '0'); }
    void pop_back() { bits_.pop_back(); }
    void clear() noexcept { bits_.clear(); }

    BitString prefix(std::size_t n) const;
    BitString appended(bool bit) const;

    bool is_prefix_of(const BitString& other) const noexcept;
    bool is_proper_prefix_of(const BitString& other) const noexcept;

    const std::string& text() const noexcept { return bits_; }

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString&, const BitString&) = default;

private:
    std::string bits_;
};

std::ostream& operator<<(std::ostream& os, const BitString& s);

}  // namespace speedprior

template <>
struct std::hash<speedprior::BitString> {
    std::size_t operator()(const speedprior::BitString& s) const noexcept
    {
        return std::hash<std::string>{}(s.text());
    }
};
