#include <nlohmann/json.hpp>

#include "areasim/model.hpp"

namespace areasim {

using nlohmann::json;

void to_json(json& j, const TimeGrid& g) {
    j = json{{"h_steps_per_ms", g.h_steps_per_ms},
             {"d_min_steps", g.d_min_steps},
             {"d_min_inter_steps", g.d_min_inter_steps},
             {"t_model_steps", g.t_model_steps}};
}

void from_json(const json& j, TimeGrid& g) {
    j.at("h_steps_per_ms").get_to(g.h_steps_per_ms);
    j.at("d_min_steps").get_to(g.d_min_steps);
    j.at("d_min_inter_steps").get_to(g.d_min_inter_steps);
    j.at("t_model_steps").get_to(g.t_model_steps);
}

// Neurons and synapses are stored as fixed-order arrays to keep pinned
// networks compact; column order is documented in FORMATS.md.
void to_json(json& j, const NetworkSpec& net) {
    json areas = json::array();
    for (const auto& a : net.areas)
        areas.push_back({{"area_id", a.area_id}, {"n_neurons", a.n_neurons}, {"rate_hz", a.rate_hz}});

    json neurons = json::array();
    for (const auto& n : net.neurons)
        neurons.push_back(json::array({n.area, n.fire_interval_steps, n.fire_phase_steps, n.frozen}));

    json synapses = json::array();
    for (const auto& s : net.synapses)
        synapses.push_back(json::array({s.source, s.target, s.delay_steps, to_string(s.range)}));

    json meta = json::object();
    for (const auto& [k, v] : net.metadata) meta[k] = v;
    meta["k_intra"] = net.k_intra;
    meta["k_inter"] = net.k_inter;

    j = json{{"grid", net.grid},
             {"areas", std::move(areas)},
             {"neurons", std::move(neurons)},
             {"synapses", std::move(synapses)},
             {"metadata", std::move(meta)}};
}

void from_json(const json& j, NetworkSpec& net) {
    net = NetworkSpec{};
    j.at("grid").get_to(net.grid);
    for (const auto& a : j.at("areas"))
        net.areas.push_back({a.at("area_id").get<std::uint32_t>(),
                             a.at("n_neurons").get<std::uint32_t>(), a.at("rate_hz").get<double>()});
    for (const auto& n : j.at("neurons")) {
        NeuronSpec spec;
        spec.area = n.at(0).get<std::uint32_t>();
        spec.fire_interval_steps = n.at(1).get<std::int64_t>();
        spec.fire_phase_steps = n.at(2).get<std::int64_t>();
        spec.frozen = n.at(3).get<bool>();
        net.neurons.push_back(spec);
    }
    for (const auto& s : j.at("synapses"))
        net.synapses.push_back({s.at(0).get<NeuronId>(), s.at(1).get<NeuronId>(),
                                s.at(2).get<std::int64_t>(),
                                range_class_from_string(s.at(3).get<std::string>())});
    for (const auto& [k, v] : j.at("metadata").items()) {
        if (k == "k_intra")
            v.get_to(net.k_intra);
        else if (k == "k_inter")
            v.get_to(net.k_inter);
        else
            net.metadata[k] = v.get<double>();
    }
    net.validate();
}

} // namespace areasim
