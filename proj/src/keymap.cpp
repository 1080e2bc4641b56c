#include "firlock/keymap.hpp"

#include <algorithm>
#include <cstdint>

#include <json.hpp>

#include "firlock/error.hpp"

namespace firlock {

std::size_t KeyMap::v() const {
    return static_cast<std::size_t>(
        std::count_if(ports.begin(), ports.end(), [](const KeyPort& k) { return k.role == KeyRole::Obf; }));
}

std::size_t KeyMap::w() const { return p() - v(); }

std::vector<bool> KeyMap::secret_key() const {
    std::vector<bool> k;
    for (const auto& port : ports) k.push_back(port.secret);
    return k;
}

std::string KeyMap::to_json() const {
    nlohmann::json j;
    j["p"] = p();
    j["v"] = v();
    j["w"] = w();
    j["secret_key"] = key_to_hex(secret_key());
    j["secret_bits"] = key_to_string(secret_key());
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const auto& port = ports[i];
        nlohmann::json e;
        e["index"] = i;
        e["role"] = port.role == KeyRole::Obf ? "obf" : "ll";
        e["secret"] = port.secret ? 1 : 0;
        if (port.hiding) {
            e["partner"] = port.hiding->partner;
            e["gate"] = port.hiding->kind == HideKind::Xor ? "XOR" : "XNOR";
        }
        arr.push_back(e);
    }
    j["ports"] = arr;
    return j.dump(2) + "\n";
}

KeyMap KeyMap::from_json(const std::string& text) {
    KeyMap km;
    try {
        auto j = nlohmann::json::parse(text);
        for (const auto& e : j.at("ports")) {
            KeyPort port;
            port.role = e.at("role").get<std::string>() == "ll" ? KeyRole::Ll : KeyRole::Obf;
            port.secret = e.at("secret").get<int>() != 0;
            if (e.contains("partner")) {
                port.hiding = KeyHiding{e.at("partner").get<std::size_t>(),
                                        e.at("gate").get<std::string>() == "XNOR" ? HideKind::Xnor : HideKind::Xor};
            }
            km.ports.push_back(port);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("key map: ") + e.what());
    }
    return km;
}

std::string key_to_hex(const std::vector<bool>& key) {
    if (key.empty()) return "0";
    std::string hex;
    for (std::size_t nib = 0; nib * 4 < key.size(); ++nib) {
        int v = 0;
        for (std::size_t b = 0; b < 4 && nib * 4 + b < key.size(); ++b)
            if (key[nib * 4 + b]) v |= 1 << b;
        hex.push_back("0123456789abcdef"[v]);
    }
    std::reverse(hex.begin(), hex.end());
    return hex;
}

std::vector<bool> key_from_hex(const std::string& hex_in, std::size_t width) {
    std::string hex = hex_in;
    if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
    std::vector<bool> key(width, false);
    std::size_t pos = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, pos += 4) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(*it)));
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else throw KeyLengthError("bad hex digit in key '" + hex_in + "'");
        for (int b = 0; b < 4; ++b) {
            bool bit = (v >> b) & 1;
            if (pos + static_cast<std::size_t>(b) < width) key[pos + static_cast<std::size_t>(b)] = bit;
            else if (bit) throw KeyLengthError("key '" + hex_in + "' has more than " + std::to_string(width) + " bits");
        }
    }
    return key;
}

std::string key_to_string(const std::vector<bool>& key) {
    std::string s;
    for (auto it = key.rbegin(); it != key.rend(); ++it) s.push_back(*it ? '1' : '0');
    return s;
}

std::vector<bool> key_from_string(const std::string& bits) {
    std::vector<bool> key;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        if (*it != '0' && *it != '1') throw KeyLengthError("key string must be binary");
        key.push_back(*it == '1');
    }
    return key;
}

std::vector<bool> key_from_uint(std::uint64_t value, std::size_t width) {
    std::vector<bool> key(width);
    for (std::size_t i = 0; i < width && i < 64; ++i) key[i] = (value >> i) & 1U;
    return key;
}

} // namespace firlock
