#include "firlock/eval.hpp"

namespace firlock {

BusEvaluator::BusEvaluator(const Netlist& netlist)
    : netlist_(std::make_shared<const Netlist>(netlist)), sim_(*netlist_) {
    if (!netlist_->is_combinational()) throw HasStateError("BusEvaluator needs a combinational netlist");
}

std::vector<std::int64_t> BusEvaluator::eval(std::span<const std::int64_t> inputs, const std::vector<bool>& key) {
    return eval_batch({std::vector<std::int64_t>(inputs.begin(), inputs.end())}, key).at(0);
}

std::vector<std::vector<std::int64_t>> BusEvaluator::eval_batch(const std::vector<std::vector<std::int64_t>>& inputs,
                                                                const std::vector<bool>& key) {
    std::vector<std::vector<bool>> keys(inputs.size(), key);
    return eval_batch(inputs, keys);
}

std::vector<std::uint64_t> pack_lanes(const std::vector<std::vector<bool>>& vectors, std::size_t width) {
    if (vectors.size() > 64) throw Error("at most 64 lanes");
    std::vector<std::uint64_t> words(width, 0);
    for (std::size_t lane = 0; lane < vectors.size(); ++lane) {
        if (vectors[lane].size() != width) throw KeyLengthError("lane width mismatch");
        for (std::size_t i = 0; i < width; ++i)
            if (vectors[lane][i]) words[i] |= std::uint64_t{1} << lane;
    }
    return words;
}

std::vector<std::vector<std::int64_t>> BusEvaluator::eval_batch(const std::vector<std::vector<std::int64_t>>& inputs,
                                                                const std::vector<std::vector<bool>>& keys) {
    const auto& in_buses = netlist_->input_buses();
    const auto& out_buses = netlist_->output_buses();
    if (inputs.size() > 64 || keys.size() != inputs.size()) throw Error("eval_batch takes at most 64 lanes");
    std::vector<std::uint64_t> in_words(netlist_->input_width(), 0);
    for (std::size_t lane = 0; lane < inputs.size(); ++lane) {
        if (inputs[lane].size() != in_buses.size()) throw IncompleteAssignment("one value per input bus expected");
        std::size_t pos = 0;
        for (std::size_t b = 0; b < in_buses.size(); ++b) {
            auto u = static_cast<std::uint64_t>(inputs[lane][b]);
            for (std::size_t i = 0; i < in_buses[b].bus.width(); ++i, ++pos)
                if (i < 64 && ((u >> i) & 1U)) in_words[pos] |= std::uint64_t{1} << lane;
        }
    }
    auto key_words = pack_lanes(keys, netlist_->key_inputs().size());
    auto out = sim_.eval(in_words, key_words);

    std::vector<std::vector<std::int64_t>> result(inputs.size());
    for (std::size_t lane = 0; lane < inputs.size(); ++lane) {
        std::size_t pos = 0;
        for (const auto& g : out_buses) {
            std::vector<bool> bits;
            for (std::size_t i = 0; i < g.bus.width(); ++i, ++pos) bits.push_back((out[pos] >> lane) & 1U);
            result[lane].push_back(bits_to_int(bits, g.bus.is_signed));
        }
    }
    return result;
}

} // namespace firlock
