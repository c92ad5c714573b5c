// Copyright (c) 2026 the wafdiff authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace wafdiff {

// Octet sequences. std::string is used as a byte container throughout; no
// text encoding is assumed unless a parser says so.
using Bytes = std::string;
using BytesView = std::string_view;

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool is_ctl(unsigned char c) { return c < 0x20 || c == 0x7f; }
inline bool is_ows(char c) { return c == ' ' || c == '\t'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

Bytes ascii_lower_copy(BytesView s);
bool ascii_ieq(BytesView a, BytesView b);
BytesView trim_ows(BytesView s);

// Case-insensitive substring search; npos when absent.
size_t ifind(BytesView haystack, BytesView needle, size_t from = 0);

// FNV-1a, used as a stable non-cryptographic request digest.
uint64_t fnv1a64(BytesView s);
Bytes hex_u64(uint64_t v);
Bytes hex_octets(BytesView s);
Bytes from_hex_octets(BytesView s);

// Deterministic RNG (splitmix64). Behaviour is identical across platforms,
// unlike std::uniform_int_distribution.
class DetRng {
public:
    explicit DetRng(uint64_t seed) : state_(seed) {}
    uint64_t next();
    // Uniform-ish draw in [0, n); n must be > 0.
    size_t below(size_t n);

private:
    uint64_t state_;
};

} // namespace wafdiff
