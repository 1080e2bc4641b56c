#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace firlock {

enum class KeyRole { Obf, Ll };
enum class HideKind { Xor, Xnor };

struct KeyHiding {
    std::size_t partner = 0; // key port index
    HideKind kind = HideKind::Xor;
};

struct KeyPort {
    KeyRole role = KeyRole::Obf;
    bool secret = false;
    std::optional<KeyHiding> hiding;
};

/// Role, secret value and hiding edge of every key port (index i is keyinput<i>).
struct KeyMap {
    std::vector<KeyPort> ports;

    std::size_t p() const { return ports.size(); }
    std::size_t v() const;
    std::size_t w() const;
    std::vector<bool> secret_key() const;

    std::string to_json() const;
    static KeyMap from_json(const std::string& text);
};

/// Bits are LSB first (bit i is keyinput<i>).
std::string key_to_hex(const std::vector<bool>& key);
std::vector<bool> key_from_hex(const std::string& hex, std::size_t width);
/// k_{p-1} ... k_1 k_0 as a '0'/'1' string.
std::string key_to_string(const std::vector<bool>& key);
std::vector<bool> key_from_string(const std::string& bits);
std::vector<bool> key_from_uint(std::uint64_t value, std::size_t width);

} // namespace firlock
