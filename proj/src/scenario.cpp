#include "idcais/scenario.hpp"

#include "json_reader.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace idcais {

using detail::JsonObject;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(AttackerPolicy p) { return p == AttackerPolicy::Optimal ? "optimal" : "evasive"; }
const char* to_string(AssignmentMode m) { return m == AssignmentMode::Cadaa ? "cadaa" : "cudaa"; }

AttackerPolicy parse_attacker_policy(const std::string& s)
{
    if (s == "optimal")
        return AttackerPolicy::Optimal;
    if (s == "evasive")
        return AttackerPolicy::Evasive;
    throw ValidationError("unknown attacker policy '" + s + "' (expected optimal|evasive)");
}

AssignmentMode parse_assignment_mode(const std::string& s)
{
    if (s == "cadaa")
        return AssignmentMode::Cadaa;
    if (s == "cudaa")
        return AssignmentMode::Cudaa;
    throw ValidationError("unknown assignment mode '" + s + "' (expected cadaa|cudaa)");
}

bool Scenario::operator==(const Scenario& o) const
{
    return world == o.world && attackers == o.attackers && defenders == o.defenders && weight == o.weight &&
           gains == o.gains && dt == o.dt && t_max == o.t_max && attacker_policy == o.attacker_policy &&
           assignment_mode == o.assignment_mode && cbf_enabled == o.cbf_enabled &&
           reassign_on_capture == o.reassign_on_capture;
}

namespace {

std::string agent_path(const char* list, std::size_t k) { return std::string("/") + list + "/" + std::to_string(k); }

}  // namespace

void Scenario::validate() const
{
    try {
        world.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("/world: ") + e.what());
    }
    if (attackers.empty())
        throw ValidationError("/attackers: at least one attacker required");
    if (defenders.size() < attackers.size())
        throw ValidationError("/defenders: need at least as many defenders as attackers");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("/dt: must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw ValidationError("/t_max: must be positive");
    if (!(weight >= 0.0 && weight < 1.0))
        throw ValidationError("/weight: must lie in [0, 1)");

    auto check_agent = [&](const AgentSpec& a, const char* list, std::size_t k, Role role) {
        const std::string path = agent_path(list, k);
        if (a.params.role != role)
            throw ValidationError(path + "/params: role mismatch");
        try {
            a.params.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(path + "/params: " + e.what());
        }
        if (!a.state.finite())
            throw ValidationError(path + "/state: non-finite state");
        if (!(a.state.velocity.norm() < a.params.speed_cap()))
            throw ValidationError(path + "/state/velocity: speed must stay below accel_bound / drag");
    };
    for (std::size_t k = 0; k < attackers.size(); ++k) {
        check_agent(attackers[k], "attackers", k, Role::Attacker);
        if (!(attackers[k].params == attackers.front().params))
            throw ValidationError(agent_path("attackers", k) + "/params: attackers must share parameters");
        if ((attackers[k].state.position - world.protected_center).norm() <= world.protected_radius)
            throw ValidationError(agent_path("attackers", k) + "/state/position: attacker starts inside the protected disc");
    }
    for (std::size_t k = 0; k < defenders.size(); ++k) {
        check_agent(defenders[k], "defenders", k, Role::Defender);
        if (!(defenders[k].params == defenders.front().params))
            throw ValidationError(agent_path("defenders", k) + "/params: defenders must share parameters");
        for (std::size_t m = 0; m < k; ++m)
            if ((defenders[k].state.position - defenders[m].state.position).norm() <= world.collision_radius)
                throw ValidationError(agent_path("defenders", k) + "/state/position: within the collision radius of defender " +
                                      std::to_string(m));
    }
    if (attacker_params().drag != defender_params().drag)
        throw ValidationError("/defenders/0/params/drag: attackers and defenders must share the drag coefficient");
    if (attacker_params().accel_bound > defender_params().effective_bound())
        throw ValidationError("/attackers/0/params/accel_bound: exceeds the defenders' effective bound");

    if (gains.shared && !(*gains.shared > 0.0))
        throw ValidationError("/gains/shared: must be positive");
    for (std::size_t k = 0; k < gains.overrides.size(); ++k) {
        const auto& o = gains.overrides[k];
        const std::string path = "/gains/overrides/" + std::to_string(k);
        if (o.j == o.jp || o.j >= defenders.size() || o.jp >= defenders.size())
            throw ValidationError(path + "/pair: must name two distinct defenders");
        if (!(o.k > 0.0))
            throw ValidationError(path + "/k: must be positive");
    }
}

std::vector<AgentState> Scenario::attacker_states() const
{
    std::vector<AgentState> out;
    for (const auto& a : attackers)
        out.push_back(a.state);
    return out;
}

std::vector<AgentState> Scenario::defender_states() const
{
    std::vector<AgentState> out;
    for (const auto& d : defenders)
        out.push_back(d.state);
    return out;
}

PairGains Scenario::pair_gains() const
{
    PairGains g;
    g.shared = gains.shared ? *gains.shared : min_gain(defender_params(), world.collision_radius).k_min;
    for (const auto& o : gains.overrides)
        g.overrides[{std::min(o.j, o.jp), std::max(o.j, o.jp)}] = o.k;
    return g;
}

namespace {

AgentSpec parse_agent(const json& j, const std::string& path, Role role)
{
    const JsonObject obj(j, path);
    obj.allow({"state", "params"});
    obj.require("state");
    AgentSpec spec;
    const JsonObject st(obj.raw("state"), obj.child("state"));
    st.allow({"position", "velocity"});
    spec.state.position = st.vec2("position");
    spec.state.velocity = st.vec2("velocity", Vec2::Zero());

    spec.params = role == Role::Attacker ? AgentParams::attacker() : AgentParams::defender();
    if (obj.has("params")) {
        const JsonObject p(obj.raw("params"), obj.child("params"));
        if (role == Role::Attacker)
            p.allow({"accel_bound", "drag", "body_radius"});
        else
            p.allow({"accel_bound", "drag", "body_radius", "margin"});
        spec.params.accel_bound = p.number("accel_bound", spec.params.accel_bound);
        spec.params.drag = p.number("drag", spec.params.drag);
        spec.params.body_radius = p.number("body_radius", spec.params.body_radius);
        if (role == Role::Defender)
            spec.params.margin = p.number("margin", 1e-3 * spec.params.accel_bound);
    }
    return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& text)
{
    const json doc = detail::parse_document(text);
    const JsonObject root(doc, "");
    root.allow({"world", "attackers", "defenders", "weight", "gains", "dt", "t_max", "attacker_policy",
                "assignment_mode", "cbf_enabled", "reassign_on_capture"});

    Scenario s;
    if (root.has("world")) {
        const JsonObject w(root.raw("world"), "/world");
        w.allow({"protected_center", "protected_radius", "capture_radius", "collision_radius"});
        s.world.protected_center = w.vec2("protected_center", s.world.protected_center);
        s.world.protected_radius = w.number("protected_radius", s.world.protected_radius);
        s.world.capture_radius = w.number("capture_radius", s.world.capture_radius);
        s.world.collision_radius = w.number("collision_radius", s.world.collision_radius);
    }
    const auto& attackers = root.array("attackers");
    for (std::size_t k = 0; k < attackers.size(); ++k)
        s.attackers.push_back(parse_agent(attackers[k], agent_path("attackers", k), Role::Attacker));
    const auto& defenders = root.array("defenders");
    for (std::size_t k = 0; k < defenders.size(); ++k)
        s.defenders.push_back(parse_agent(defenders[k], agent_path("defenders", k), Role::Defender));

    s.weight = root.number("weight", s.weight);
    if (root.has("gains")) {
        const JsonObject g(root.raw("gains"), "/gains");
        g.allow({"shared", "overrides"});
        if (g.has("shared"))
            s.gains.shared = g.number("shared");
        if (g.has("overrides")) {
            const auto& list = g.array("overrides");
            for (std::size_t k = 0; k < list.size(); ++k) {
                const JsonObject o(list[k], "/gains/overrides/" + std::to_string(k));
                o.allow({"pair", "k"});
                const auto& pair = o.array("pair");
                if (pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned())
                    throw ValidationError(o.child("pair") + ": expected two defender indices");
                s.gains.overrides.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>(), o.number("k")});
            }
        }
    }
    s.dt = root.number("dt", s.dt);
    s.t_max = root.number("t_max", s.t_max);
    try {
        s.attacker_policy = parse_attacker_policy(root.string("attacker_policy", "optimal"));
        s.assignment_mode = parse_assignment_mode(root.string("assignment_mode", "cadaa"));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("/: ") + e.what());
    }
    s.cbf_enabled = root.boolean("cbf_enabled", s.cbf_enabled);
    s.reassign_on_capture = root.boolean("reassign_on_capture", s.reassign_on_capture);
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

ordered_json agent_json(const AgentSpec& a)
{
    ordered_json params;
    params["accel_bound"] = a.params.accel_bound;
    params["drag"] = a.params.drag;
    params["body_radius"] = a.params.body_radius;
    if (a.params.role == Role::Defender)
        params["margin"] = a.params.margin;
    ordered_json state;
    state["position"] = detail::to_json(a.state.position);
    state["velocity"] = detail::to_json(a.state.velocity);
    ordered_json out;
    out["state"] = state;
    out["params"] = params;
    return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& s)
{
    ordered_json doc;
    ordered_json world;
    world["protected_center"] = detail::to_json(s.world.protected_center);
    world["protected_radius"] = s.world.protected_radius;
    world["capture_radius"] = s.world.capture_radius;
    world["collision_radius"] = s.world.collision_radius;
    doc["world"] = world;
    doc["attackers"] = ordered_json::array();
    for (const auto& a : s.attackers)
        doc["attackers"].push_back(agent_json(a));
    doc["defenders"] = ordered_json::array();
    for (const auto& d : s.defenders)
        doc["defenders"].push_back(agent_json(d));
    doc["weight"] = s.weight;
    ordered_json gains;
    gains["shared"] = s.gains.shared ? ordered_json(*s.gains.shared) : ordered_json(nullptr);
    gains["overrides"] = ordered_json::array();
    for (const auto& o : s.gains.overrides) {
        ordered_json e;
        e["pair"] = ordered_json::array({o.j, o.jp});
        e["k"] = o.k;
        gains["overrides"].push_back(e);
    }
    doc["gains"] = gains;
    doc["dt"] = s.dt;
    doc["t_max"] = s.t_max;
    doc["attacker_policy"] = to_string(s.attacker_policy);
    doc["assignment_mode"] = to_string(s.assignment_mode);
    doc["cbf_enabled"] = s.cbf_enabled;
    doc["reassign_on_capture"] = s.reassign_on_capture;
    return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path + "'");
    out << serialize_scenario(s);
}

}  // namespace idcais
