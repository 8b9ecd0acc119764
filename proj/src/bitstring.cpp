#include "speedprior/bitstring.hpp"

#include <stdexcept>

namespace speedprior {

BitString::BitString(std::string_view text) : bits_(text)
{
    for (char c : bits_) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string may only contain '0' and '1': \"" +
                                        std::string(text) + "\"");
        }
    }
}

BitString BitString::from_bits(unsigned value, std::size_t width)
{
    BitString s;
    for (std::size_t i = width; i-- > 0;) {
        s.push_back(((value >> i) & 1U) != 0);
    }
    return s;
}

BitString BitString::prefix(std::size_t n) const
{
    BitString s;
    s.bits_ = bits_.substr(0, n);
    return s;
}

BitString BitString::appended(bool bit) const
{
    BitString s = *this;
    s.push_back(bit);
    return s;
}

bool BitString::is_prefix_of(const BitString& other) const noexcept
{
    return bits_.size() <= other.bits_.size() &&
           other.bits_.compare(0, bits_.size(), bits_) == 0;
}

bool BitString::is_proper_prefix_of(const BitString& other) const noexcept
{
    return bits_.size() < other.bits_.size() && is_prefix_of(other);
}

std::ostream& operator<<(std::ostream& os, const BitString& s)
{
    return os << (s.empty() ? std::string("\"\"") : s.text());
}

}  // namespace speedprior
