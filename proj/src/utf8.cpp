#include "utf8.hpp"

namespace farmlens::utf8 {

char32_t next(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const int c = cont(static_cast<std::size_t>(k));
        if (c < 0) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | static_cast<char32_t>(c);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

namespace {
constexpr bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }
} // namespace

bool is_letter(char32_t c) {
    if (c < 0x80) return in(c, 'A', 'Z') || in(c, 'a', 'z');
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
    if (in(c, 0xC0, 0x24F)) return c != 0xD7 && c != 0xF7;
    return in(c, 0x250, 0x2AF)      // IPA extensions
           || (in(c, 0x386, 0x3FF) && c != 0x387)  // Greek
           || (in(c, 0x400, 0x52F) && !in(c, 0x482, 0x489))  // Cyrillic
           || in(c, 0x531, 0x587)   // Armenian
           || in(c, 0x5D0, 0x5EA)   // Hebrew
           || in(c, 0x620, 0x64A) || in(c, 0x671, 0x6D3)  // Arabic
           || in(c, 0x900, 0xDFF)   // Indic scripts, marks included so words stay whole
           || in(c, 0xE01, 0xE4E)   // Thai
           || in(c, 0x1100, 0x11FF) || in(c, 0xAC00, 0xD7A3)  // Hangul
           || in(c, 0x1E00, 0x1FFF)  // Latin extended additional, Greek extended
           || in(c, 0x3041, 0x30FF)  // kana
           || in(c, 0x3400, 0x4DBF) || in(c, 0x4E00, 0x9FFF);  // CJK
}

bool is_upper(char32_t c) {
    if (c < 0x80) return in(c, 'A', 'Z');
    if (in(c, 0xC0, 0xDE)) return c != 0xD7;
    if (in(c, 0x100, 0x137) || in(c, 0x14A, 0x177)) return c % 2 == 0;
    if (in(c, 0x139, 0x148) || in(c, 0x179, 0x17E)) return c % 2 == 1;
    if (c == 0x178) return true;
    if (in(c, 0x391, 0x3A9)) return c != 0x3A2;
    if (in(c, 0x400, 0x42F)) return true;
    return false;
}

char32_t to_lower(char32_t c) {
    if (!is_upper(c)) return c;
    if (c < 0x80 || in(c, 0xC0, 0xDE)) return c + 32;
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    if (in(c, 0x100, 0x17E)) return c + 1;
    if (in(c, 0x391, 0x3A9)) return c + 32;
    if (in(c, 0x410, 0x42F)) return c + 32;
    if (in(c, 0x400, 0x40F)) return c + 80;
    return c;
}

bool is_space(char32_t c) {
    return c == ' ' || in(c, 0x09, 0x0D) || c == 0xA0 || c == 0x1680 || in(c, 0x2000, 0x200A) || c == 0x2028 ||
           c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_digit(char32_t c) { return in(c, '0', '9') || in(c, 0xFF10, 0xFF19); }

bool is_punct(char32_t c) {
    if (c < 0x80) return in(c, 0x21, 0x2F) || in(c, 0x3A, 0x40) || in(c, 0x5B, 0x60) || in(c, 0x7B, 0x7E);
    return in(c, 0xA1, 0xBF) || c == 0xD7 || c == 0xF7 || in(c, 0x2010, 0x2027) || in(c, 0x2030, 0x205E) ||
           in(c, 0x3001, 0x303F) || in(c, 0xFF01, 0xFF0F);
}

} // namespace farmlens::utf8
