#include "pulseforge/workbench.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "pulseforge/error.hpp"

namespace pulseforge::workbench {

namespace {

constexpr double kGHz = 1e9;
constexpr double kNs = 1e-9;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx)
{
    if (!j.is_object()) throw ValidationError(ctx + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError("unknown field '" + (ctx.empty() ? key : ctx + "." + key) + "'");
    }
}

std::string field_name(const std::string& ctx, const char* key)
{
    return ctx.empty() ? std::string(key) : ctx + "." + key;
}

double get_number(const json& j, const char* key, const std::string& ctx)
{
    if (!j.contains(key)) throw ValidationError("missing field '" + field_name(ctx, key) + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError("field '" + field_name(ctx, key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError("field '" + field_name(ctx, key) + "' must be finite");
    return x;
}

double get_number_or(const json& j, const char* key, const std::string& ctx, double fallback)
{
    return j.contains(key) ? get_number(j, key, ctx) : fallback;
}

int get_int_or(const json& j, const char* key, const std::string& ctx, int fallback)
{
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ValidationError("field '" + field_name(ctx, key) + "' must be an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& ctx)
{
    if (!j.contains(key)) throw ValidationError("missing field '" + field_name(ctx, key) + "'");
    const auto& v = j.at(key);
    if (!v.is_string()) throw ValidationError("field '" + field_name(ctx, key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const char* key, const std::string& ctx)
{
    if (!j.contains(key)) return {};
    const auto& v = j.at(key);
    if (!v.is_array()) throw ValidationError("field '" + field_name(ctx, key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ValidationError("field '" + field_name(ctx, key) + "' must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string frame_name(Frame f)
{
    return f == Frame::lab ? "lab" : "rotating_rwa";
}

Frame frame_from_name(const std::string& s)
{
    if (s == "lab") return Frame::lab;
    if (s == "rotating_rwa") return Frame::rotating_rwa;
    throw ValidationError("field 'frame' must be \"lab\" or \"rotating_rwa\", got \"" + s + "\"");
}

std::string fmt17(double x)
{
    return fmt::format("{:.17g}", x);
}

// ---------------------------------------------------------------------------
// TOML subset

std::string strip_comment(const std::string& line)
{
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

json toml_scalar(const std::string& raw, int line_no)
{
    const std::string v = trim(raw);
    const auto fail = [&] { return ValidationError(fmt::format("TOML line {}: cannot parse value '{}'", line_no, v)); };
    if (v.empty()) throw fail();
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw fail();
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '[') {
        if (v.back() != ']') throw fail();
        json arr = json::array();
        const std::string body = trim(v.substr(1, v.size() - 2));
        if (body.empty()) return arr;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            arr.push_back(toml_scalar(item, line_no));
        }
        return arr;
    }
    std::string num;
    for (char c : v) {
        if (c != '_') num.push_back(c);
    }
    const bool is_int = num.find_first_of(".eE") == std::string::npos && num != "inf" && num != "nan";
    try {
        std::size_t used = 0;
        if (is_int) {
            const long long x = std::stoll(num, &used);
            if (used == num.size()) return x;
        } else {
            const double x = std::stod(num, &used);
            if (used == num.size()) return x;
        }
    } catch (const std::exception&) {
    }
    throw fail();
}

}  // namespace

json parse_toml(const std::string& text)
{
    json root = json::object();
    json* table = &root;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ValidationError(fmt::format("TOML line {}: malformed table header", line_no));
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty() || name.find('.') != std::string::npos) {
                throw ValidationError(fmt::format("TOML line {}: only single-level tables are supported", line_no));
            }
            root[name] = json::object();
            table = &root[name];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError(fmt::format("TOML line {}: expected key = value", line_no));
        std::string key = trim(s.substr(0, eq));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
        if (key.empty()) throw ValidationError(fmt::format("TOML line {}: empty key", line_no));
        (*table)[key] = toml_scalar(s.substr(eq + 1), line_no);
    }
    return root;
}

std::string read_text(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw IoError("error while writing '" + path.string() + "'");
}

json read_config(const fs::path& path)
{
    const std::string text = read_text(path);
    if (path.extension() == ".toml") return parse_toml(text);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Device

json device_to_json(const DeviceModel& dev)
{
    json j{{"qubit_freq_ghz", dev.qubit_freq_hz / kGHz},
           {"drive_strength_ghz", dev.drive_strength_hz / kGHz},
           {"dt_ns", dev.dt_s / kNs},
           {"frame", frame_name(dev.frame)}};
    if (dev.substeps) j["substeps"] = *dev.substeps;
    if (dev.drive_freq_hz) j["drive_freq_ghz"] = *dev.drive_freq_hz / kGHz;
    return j;
}

DeviceModel device_from_json(const json& j)
{
    const std::string ctx = "device";
    check_keys(j, {"qubit_freq_ghz", "drive_strength_ghz", "dt_ns", "substeps", "frame", "drive_freq_ghz"}, ctx);
    DeviceModel d;
    d.qubit_freq_hz = get_number_or(j, "qubit_freq_ghz", ctx, d.qubit_freq_hz / kGHz) * kGHz;
    d.drive_strength_hz = get_number_or(j, "drive_strength_ghz", ctx, d.drive_strength_hz / kGHz) * kGHz;
    d.dt_s = get_number_or(j, "dt_ns", ctx, d.dt_s / kNs) * kNs;
    if (j.contains("substeps")) d.substeps = get_int_or(j, "substeps", ctx, 1);
    if (j.contains("frame")) d.frame = frame_from_name(get_string(j, "frame", ctx));
    if (j.contains("drive_freq_ghz")) d.drive_freq_hz = get_number(j, "drive_freq_ghz", ctx) * kGHz;
    d.validate();
    return d;
}

DeviceModel load_device(const fs::path& path)
{
    return device_from_json(read_config(path));
}

// ---------------------------------------------------------------------------
// Pulse parameters and trainer config

json params_to_json(const PulseParams& p)
{
    return json{{"duration", p.duration},
                {"signed_modulus", p.signed_modulus},
                {"argument", p.argument},
                {"variance", p.variance},
                {"correction_amplitude", p.correction_amplitude},
                {"phase", p.phase}};
}

PulseParams params_from_json(const json& j)
{
    const std::string ctx = "params";
    check_keys(j, {"duration", "signed_modulus", "argument", "variance", "correction_amplitude", "phase"}, ctx);
    PulseParams p;
    p.duration = get_number_or(j, "duration", ctx, p.duration);
    p.signed_modulus = get_number_or(j, "signed_modulus", ctx, p.signed_modulus);
    p.argument = get_number_or(j, "argument", ctx, p.argument);
    p.variance = get_number_or(j, "variance", ctx, p.variance);
    p.correction_amplitude = get_number_or(j, "correction_amplitude", ctx, p.correction_amplitude);
    p.phase = get_number_or(j, "phase", ctx, p.phase);
    return p;
}

json trainer_to_json(const TrainerConfig& cfg)
{
    json init;
    switch (cfg.init) {
    case InitMode::nominal: init = "nominal"; break;
    case InitMode::random: init = "random"; break;
    case InitMode::explicit_params: init = params_to_json(cfg.init_params); break;
    }
    return json{{"epochs", cfg.epochs},
                {"dataset_size", cfg.dataset_size},
                {"seed", cfg.seed},
                {"learning_rate", cfg.learning_rate},
                {"optimizer", cfg.optimizer == Optimizer::adam ? "adam" : "gd"},
                {"init", init},
                {"init_noise", cfg.init_noise},
                {"step_scale", cfg.step_scale},
                {"step_rejection", cfg.step_rejection},
                {"squash_sign", cfg.squash_sign == SquashSign::standard ? "standard" : "mirrored"},
                {"bounds",
                 {{"duration_min", cfg.bounds.duration_min},
                  {"duration_max", cfg.bounds.duration_max},
                  {"variance_min", cfg.bounds.variance_min},
                  {"variance_max", cfg.bounds.variance_max}}}};
}

TrainerConfig trainer_from_json(const json& j)
{
    const std::string ctx = "trainer";
    check_keys(j,
               {"epochs", "dataset_size", "seed", "learning_rate", "optimizer", "init", "init_noise", "step_scale",
                "step_rejection", "squash_sign", "bounds"},
               ctx);
    TrainerConfig c;
    c.epochs = get_int_or(j, "epochs", ctx, c.epochs);
    c.dataset_size = get_int_or(j, "dataset_size", ctx, c.dataset_size);
    if (j.contains("seed")) {
        const auto& s = j.at("seed");
        if (!s.is_number_integer()) throw ValidationError("field 'trainer.seed' must be an integer");
        c.seed = s.is_number_unsigned() ? s.get<std::uint64_t>() : static_cast<std::uint64_t>(s.get<std::int64_t>());
    }
    c.learning_rate = get_number_or(j, "learning_rate", ctx, c.learning_rate);
    if (j.contains("optimizer")) {
        const auto o = get_string(j, "optimizer", ctx);
        if (o == "adam") c.optimizer = Optimizer::adam;
        else if (o == "gd") c.optimizer = Optimizer::gd;
        else throw ValidationError("field 'trainer.optimizer' must be \"adam\" or \"gd\"");
    }
    if (j.contains("init")) {
        const auto& i = j.at("init");
        if (i.is_string() && i == "nominal") c.init = InitMode::nominal;
        else if (i.is_string() && i == "random") c.init = InitMode::random;
        else if (i.is_object()) {
            c.init = InitMode::explicit_params;
            c.init_params = params_from_json(i);
        } else {
            throw ValidationError("field 'trainer.init' must be \"nominal\", \"random\" or a parameter object");
        }
    }
    c.init_noise = get_number_or(j, "init_noise", ctx, c.init_noise);
    if (j.contains("step_scale")) {
        const auto s = get_numbers(j, "step_scale", ctx);
        if (s.size() != PulseParams::size) throw ValidationError("field 'trainer.step_scale' needs 6 entries");
        std::copy(s.begin(), s.end(), c.step_scale.begin());
    }
    if (j.contains("step_rejection")) {
        if (!j.at("step_rejection").is_boolean()) throw ValidationError("field 'trainer.step_rejection' must be a boolean");
        c.step_rejection = j.at("step_rejection").get<bool>();
    }
    if (j.contains("squash_sign")) {
        const auto s = get_string(j, "squash_sign", ctx);
        if (s == "standard") c.squash_sign = SquashSign::standard;
        else if (s == "mirrored") c.squash_sign = SquashSign::mirrored;
        else throw ValidationError("field 'trainer.squash_sign' must be \"standard\" or \"mirrored\"");
    }
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        const std::string bctx = "trainer.bounds";
        check_keys(b, {"duration_min", "duration_max", "variance_min", "variance_max"}, bctx);
        c.bounds.duration_min = get_number_or(b, "duration_min", bctx, c.bounds.duration_min);
        c.bounds.duration_max = get_number_or(b, "duration_max", bctx, c.bounds.duration_max);
        c.bounds.variance_min = get_number_or(b, "variance_min", bctx, c.bounds.variance_min);
        c.bounds.variance_max = get_number_or(b, "variance_max", bctx, c.bounds.variance_max);
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Experiment spec

ExperimentSpec experiment_from_json(const json& j, const fs::path& base_dir)
{
    check_keys(j, {"target", "device", "trainer", "outputs", "threshold"}, "");
    ExperimentSpec spec;

    if (!j.contains("target")) throw ValidationError("missing field 'target'");
    const auto& t = j.at("target");
    if (t.is_string()) {
        spec.target.name = t.get<std::string>();
    } else {
        check_keys(t, {"gate", "angles"}, "target");
        spec.target.name = get_string(t, "gate", "target");
        spec.target.angles = get_numbers(t, "angles", "target");
    }
    const auto& names = registered_gates();
    if (std::find(names.begin(), names.end(), spec.target.name) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw ValidationError("field 'target.gate': \"" + spec.target.name + "\" is not in the registered set {" +
                              list + "}");
    }
    try {
        resolve_gate(spec.target);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("field 'target.angles': ") + e.what());
    }

    if (j.contains("device")) {
        const auto& d = j.at("device");
        if (!d.is_string()) throw ValidationError("field 'device' must be a path string");
        fs::path p = d.get<std::string>();
        spec.device_path = p.is_absolute() ? p : base_dir / p;
    }
    if (j.contains("trainer")) spec.trainer = trainer_from_json(j.at("trainer"));

    fs::path out = j.contains("outputs") ? fs::path(get_string(j, "outputs", "")) : fs::path("out");
    spec.outputs = out.is_absolute() ? out : base_dir / out;
    spec.threshold = get_number_or(j, "threshold", "", spec.threshold);
    if (!(spec.threshold > 0.0)) throw ValidationError("field 'threshold' must be > 0");
    return spec;
}

ExperimentSpec load_experiment(const fs::path& path)
{
    return experiment_from_json(read_config(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Training records

json run_to_json(const TrainingRun& run, const std::string& timestamp)
{
    const auto& p = run.final_params;
    return json{{"gate", run.gate.name},
                {"duration", p.duration},
                {"signed_modulus", p.signed_modulus},
                {"effective_signed_modulus", p.effective_modulus(run.config.squash_sign)},
                {"argument", p.argument},
                {"variance", p.variance},
                {"correction_amplitude", p.correction_amplitude},
                {"phase", p.phase},
                {"infidelity", run.final_infidelity},
                {"metadata",
                 {{"device", device_to_json(run.device)},
                  {"config", trainer_to_json(run.config)},
                  {"angles", run.gate.angles},
                  {"initial_infidelity", run.initial_infidelity},
                  {"timestamp", timestamp}}}};
}

TrainingRun run_from_json(const json& j, std::vector<TracePoint> trace)
{
    check_keys(j,
               {"gate", "duration", "signed_modulus", "effective_signed_modulus", "argument", "variance",
                "correction_amplitude", "phase", "infidelity", "metadata"},
               "");
    if (!j.contains("metadata")) throw ValidationError("missing field 'metadata'");
    const auto& meta = j.at("metadata");
    check_keys(meta, {"device", "config", "angles", "initial_infidelity", "timestamp"}, "metadata");

    GateSpec gate{get_string(j, "gate", ""), get_numbers(meta, "angles", "metadata")};
    const Unitary2 target = resolve_gate(gate);

    PulseParams p;
    p.duration = get_number(j, "duration", "");
    p.signed_modulus = get_number(j, "signed_modulus", "");
    p.argument = get_number(j, "argument", "");
    p.variance = get_number(j, "variance", "");
    p.correction_amplitude = get_number(j, "correction_amplitude", "");
    p.phase = get_number(j, "phase", "");

    if (!meta.contains("device")) throw ValidationError("missing field 'metadata.device'");
    if (!meta.contains("config")) throw ValidationError("missing field 'metadata.config'");
    const DeviceModel dev = device_from_json(meta.at("device"));
    const TrainerConfig cfg = trainer_from_json(meta.at("config"));

    TrainingRun run{gate, target, std::move(trace), p, get_number(j, "infidelity", ""),
                    get_number_or(meta, "initial_infidelity", "metadata", 0.0), dev, cfg};
    return run;
}

std::string trace_to_csv(const std::vector<TracePoint>& trace)
{
    std::string out = "epoch,infidelity\n";
    for (const auto& t : trace) out += fmt::format("{},{}\n", t.epoch, fmt17(t.infidelity));
    return out;
}

std::vector<TracePoint> trace_from_csv(const std::string& text)
{
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "epoch,infidelity") {
        throw ValidationError("trace CSV: expected header 'epoch,infidelity'");
    }
    std::vector<TracePoint> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("trace CSV: malformed row '" + line + "'");
        try {
            out.push_back({std::stoi(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ValidationError("trace CSV: malformed row '" + line + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schedules and sweeps

json schedule_to_json(const PulseSchedule& sched, double dt_s)
{
    json samples = json::array();
    for (const auto& d : sched.samples) samples.push_back({d.real(), d.imag()});
    json j{{"n", sched.samples.size()}, {"dt", dt_s}, {"pre_phase", sched.pre_phase}, {"samples", samples}};
    j["params"] = sched.source ? params_to_json(*sched.source) : json::object();
    return j;
}

PulseSchedule schedule_from_json(const json& j)
{
    check_keys(j, {"n", "dt", "pre_phase", "samples", "params"}, "schedule");
    PulseSchedule s;
    s.pre_phase = get_number_or(j, "pre_phase", "schedule", 0.0);
    if (!j.contains("samples") || !j.at("samples").is_array()) {
        throw ValidationError("field 'schedule.samples' must be an array of [re, im] pairs");
    }
    for (const auto& pair : j.at("samples")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ValidationError("field 'schedule.samples' must be an array of [re, im] pairs");
        }
        const cplx d{pair[0].get<double>(), pair[1].get<double>()};
        if (std::abs(d) > 1.0) throw ValidationError("field 'schedule.samples': magnitude above 1");
        s.samples.push_back(d);
    }
    if (j.contains("n")) {
        if (!j.at("n").is_number_unsigned() || j.at("n").get<std::size_t>() != s.samples.size()) {
            throw ValidationError("field 'schedule.n' does not match the number of samples");
        }
    }
    if (s.samples.empty()) throw ValidationError("field 'schedule.samples' is empty");
    if (j.contains("params") && !j.at("params").empty()) s.source = params_from_json(j.at("params"));
    return s;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep)
{
    std::string out = "f_hz,excited_pop\n";
    for (const auto& p : sweep) out += fmt::format("{},{}\n", fmt17(p.freq_hz), fmt17(p.excited_pop));
    return out;
}

std::vector<SweepPoint> sweep_from_csv(const std::string& text)
{
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "f_hz,excited_pop") {
        throw ValidationError("sweep CSV: expected header 'f_hz,excited_pop'");
    }
    std::vector<SweepPoint> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        try {
            out.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ValidationError("sweep CSV: malformed row '" + line + "'");
        }
    }
    return out;
}

std::string verify_to_csv(const VerifyReport& report)
{
    std::string out = "input,theta,phi,ideal_p0,ideal_p1,trained_p0,trained_p1\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        out += fmt::format("{},{},{},{},{},{},{}\n", i, fmt17(r.theta), fmt17(r.phi), fmt17(r.ideal_p0),
                           fmt17(r.ideal_p1), fmt17(r.trained_p0), fmt17(r.trained_p1));
    }
    return out;
}

std::string render_table(const std::vector<TrainingRun>& runs)
{
    std::string out = fmt::format("{:<6} {:>9} {:>10} {:>10} {:>9} {:>9} {:>11} {:>9} {:>11}\n", "Gate", "Duration",
                                  "SignedMod", "EffMod", "Argument", "Variance", "Correction", "Phase", "Infidelity");
    for (const auto& r : runs) {
        const auto& p = r.final_params;
        out += fmt::format("{:<6} {:>9.2f} {:>10.4f} {:>10.4f} {:>9.4f} {:>9.2f} {:>11.4f} {:>9.4f} {:>11.3E}\n",
                           r.gate.name, p.duration, p.signed_modulus, p.effective_modulus(r.config.squash_sign),
                           p.argument, p.variance, p.correction_amplitude, p.phase, r.final_infidelity);
    }
    return out;
}

PulseSchedule default_probe()
{
    PulseParams p;
    p.duration = 320.0;
    p.signed_modulus = unsquash(0.02);
    p.argument = 0.0;
    p.variance = 64.0;
    p.correction_amplitude = 0.0;
    p.phase = 0.0;
    return sample_schedule(p);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

void write_run_outputs(const TrainingRun& run, const fs::path& dir)
{
    write_text(dir / "run.json", run_to_json(run, utc_timestamp()).dump(2) + "\n");
    write_text(dir / "trace.csv", trace_to_csv(run.trace));
    const auto sched = capped_schedule(run.final_params, run.config.squash_sign).schedule;
    write_text(dir / "schedule.json", schedule_to_json(sched, run.device.dt_s).dump(2) + "\n");
}

}  // namespace

int cmd_train(const fs::path& spec_path, const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        ExperimentSpec spec = load_experiment(spec_path);
        if (opts.seed) spec.trainer.seed = *opts.seed;
        spec.trainer.threads = opts.threads;
        const DeviceModel dev = spec.device_path ? load_device(*spec.device_path) : DeviceModel{};

        const TrainingRun run = train(spec.target, spec.trainer, dev);
        write_run_outputs(run, spec.outputs);
        out << fmt::format("{}: final infidelity {:.4e} after {} epochs -> {}\n", run.gate.name, run.final_infidelity,
                           run.trace.size(), (spec.outputs / "run.json").string());
        if (!(run.final_infidelity <= spec.threshold)) {
            err << fmt::format("did not converge: infidelity {:.4e} above threshold {:.1e}\n", run.final_infidelity,
                               spec.threshold);
            return kExitNumerical;
        }
        return kExitOk;
    });
}

int cmd_suite(const fs::path& device_path, const fs::path& out_dir, const CommandOptions& opts, std::ostream& out,
              std::ostream& err)
{
    return guarded(err, [&] {
        const DeviceModel dev = load_device(device_path);
        TrainerConfig cfg;
        if (opts.seed) cfg.seed = *opts.seed;
        cfg.threads = opts.threads;
        const double angle = 0.5 * std::numbers::pi;
        const double w = 0.25 * std::numbers::pi;

        const SuiteResult res = train_suite(dev, cfg, angle, w);
        const std::string stamp = utc_timestamp();
        json table = json::array();
        for (const auto& r : res.runs) {
            table.push_back(run_to_json(r, stamp));
            write_text(out_dir / "traces" / (r.gate.name + ".csv"), trace_to_csv(r.trace));
        }
        write_text(out_dir / "table1.json", table.dump(2) + "\n");
        const std::string rendered = render_table(res.runs);
        write_text(out_dir / "table1.txt", rendered);
        out << rendered;

        bool ok = res.failures.empty();
        for (const auto& f : res.failures) err << f.gate.name << ": " << f.message << '\n';
        for (const auto& r : res.runs) {
            if (!(r.final_infidelity <= 1e-2)) {
                err << fmt::format("{}: infidelity {:.4e} above 1e-2\n", r.gate.name, r.final_infidelity);
                ok = false;
            }
        }
        return ok ? kExitOk : kExitNumerical;
    });
}

int cmd_verify(const fs::path& run_path, std::optional<Frame> frame, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const TrainingRun run = run_from_json(read_config(run_path));
        DeviceModel dev = run.device;
        if (frame && *frame != dev.frame) {
            dev.frame = *frame;
            dev.substeps.reset();
        }
        const fs::path csv = run_path.parent_path() / "verify.csv";
        if (run.gate.name == "SX") {
            const auto rep = verify_s_sx_s(run, dev);
            write_text(csv, verify_to_csv(rep));
            out << fmt::format("S-SX-S vs H: max probability deviation {:.3e} over {} inputs\n", rep.max_deviation,
                               rep.rows.size());
            return rep.max_deviation <= 0.02 ? kExitOk : kExitNumerical;
        }
        const auto rep = process_check(realized_unitary(run, dev), run.target, 100);
        write_text(csv, verify_to_csv(rep));
        out << fmt::format("{}: average state fidelity {:.6f} over {} fresh inputs\n", run.gate.name,
                           rep.average_fidelity, rep.rows.size());
        return rep.average_fidelity >= 0.99 ? kExitOk : kExitNumerical;
    });
}

int cmd_sweep(const fs::path& device_path, double f_min_hz, double f_max_hz, int n_points,
              const std::optional<fs::path>& probe_path, const fs::path& out_dir, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const DeviceModel dev = load_device(device_path);
        const PulseSchedule probe = probe_path ? schedule_from_json(read_config(*probe_path)) : default_probe();
        const auto sweep = frequency_sweep(dev, f_min_hz, f_max_hz, n_points, probe);
        write_text(out_dir / "sweep.csv", sweep_to_csv(sweep));
        out << fmt::format("estimated resonance: {:.6f} GHz\n", estimate_resonance(sweep) / kGHz);
        return kExitOk;
    });
}

}  // namespace pulseforge::workbench
