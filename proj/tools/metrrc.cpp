/**************************************************************************
 * metrrc.cpp
 *
 * Copyright 2026 The metrrc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metrrc/metrrc.hpp"

namespace fs = std::filesystem;
using namespace metrrc;

namespace {

constexpr int EXIT_PARAM = 2;
constexpr int EXIT_UNRECOVERABLE = 3;
constexpr int EXIT_IO = 4;

// ---------------------------------------------------------------- helpers

std::vector<uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path.string());
    return bytes;
}

void write_file(const fs::path& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("write failed on " + path.string());
}

/// Field selection: GF(2^8) whenever it admits the rack size, otherwise the
/// smallest prime p > n with u | p-1. Explicit forms: "29", "2^8",
/// "2^13:0x201B".
FieldSpec resolve_field(const std::string& s, const CodeParams& p) {
    if (s == "auto") {
        if (p.u != 0 && 255 % p.u == 0 && p.n < 256) return FieldSpec::binary(8);
        for (uint32_t q = p.n + 1;; ++q)
            if ((q - 1) % p.u == 0 && detail::is_prime(q)) return FieldSpec::prime(q);
    }
    if (s.rfind("2^", 0) == 0) {
        const size_t colon = s.find(':');
        const uint32_t m = uint32_t(std::stoul(s.substr(2, colon - 2)));
        uint32_t poly = 0;
        if (colon != std::string::npos)
            poly = uint32_t(std::stoul(s.substr(colon + 1), nullptr, 0));
        return FieldSpec::binary(m, poly);
    }
    return FieldSpec::prime(uint32_t(std::stoul(s)));
}

std::vector<uint32_t> parse_node_list(const std::string& s, const CodeParams& p) {
    std::vector<uint32_t> labels;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const size_t colon = item.find(':');
        if (colon == std::string::npos) throw ParamError("node spec must be e:g, got " + item);
        const uint32_t e = uint32_t(std::stoul(item.substr(0, colon)));
        const uint32_t g = uint32_t(std::stoul(item.substr(colon + 1)));
        if (e >= p.n / p.u || g >= p.u) throw ParamError("node " + item + " out of range");
        labels.push_back(e * p.u + g);
    }
    return labels;
}

std::vector<uint32_t> parse_rack_list(const std::string& s) {
    std::vector<uint32_t> racks;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) racks.push_back(uint32_t(std::stoul(item)));
    return racks;
}

std::string join(std::span<const uint32_t> xs) {
    if (xs.empty()) return "none";
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(xs[i]);
    }
    return s;
}

// Either code family behind one interface for the file pipeline.
struct Codec {
    std::unique_ptr<MsrrCode> msrr;
    std::unique_ptr<MbrrCode> mbrr;

    static Codec make(const CodeParams& p, CodeMode mode, const Field& f) {
        Codec c;
        if (mode == CodeMode::MSRR)
            c.msrr = std::make_unique<MsrrCode>(p, f);
        else
            c.mbrr = std::make_unique<MbrrCode>(p, f);
        return c;
    }

    const Field& field() const { return msrr ? msrr->field() : mbrr->field(); }
    const CodeParams& params() const { return msrr ? msrr->params() : mbrr->params(); }
    const DerivedParams& derived() const { return msrr ? msrr->derived() : mbrr->derived(); }
    uint32_t threshold() const {
        return msrr ? msrr->reconstruct_threshold() : mbrr->reconstruct_threshold();
    }

    // stripe data (B symbols) -> node-major flat symbols (alpha per node)
    std::vector<Fel> encode_stripe(std::span<const Fel> data, bool systematic) const {
        if (msrr) return systematic ? msrr->encode_systematic(data) : msrr->encode_plain(data);
        FMatrix c =
            systematic ? mbrr->encode_systematic(data) : mbrr->encode(mbrr->fill_message(data));
        std::vector<Fel> flat;
        flat.reserve(c.rows() * c.cols());
        for (size_t i = 0; i < c.rows(); ++i)
            for (size_t j = 0; j < c.cols(); ++j) flat.push_back(c.at(i, j));
        return flat;
    }
};

// ------------------------------------------------------------ cmd: params

void print_params_block(const CodeParams& p, CodeMode mode) {
    DerivedParams d = derive(p, mode);
    const uint64_t storage = uint64_t(p.n) * d.alpha;
    std::cout << "mode " << mode_name(mode) << "\n"
              << "n " << p.n << "\n"
              << "u " << p.u << "\n"
              << "k " << p.k << "\n"
              << "l " << p.l << "\n"
              << "dbar " << p.dbar << "\n"
              << "nbar " << d.nbar << "\n"
              << "kbar " << d.kbar << "\n"
              << "u0 " << d.u0 << "\n"
              << "u0_tilde " << d.u0_tilde << "\n"
              << "alpha " << d.alpha << "\n"
              << "beta " << d.beta << "\n"
              << "B " << d.file_size << "\n"
              << "overhead " << storage << "/" << d.file_size << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", double(storage) / double(d.file_size));
    std::cout << "overhead_decimal " << buf << "\n"
              << "repair_bandwidth_per_failure " << uint64_t(p.dbar) * d.beta << "\n";
}

int cmd_params(const CodeParams& p, const std::string& mode) {
    validate(p);
    if (mode == "msrr" || mode == "both") print_params_block(p, CodeMode::MSRR);
    if (mode == "mbrr" || (mode == "both" && p.dbar > 0)) {
        if (mode == "both") std::cout << "\n";
        print_params_block(p, CodeMode::MBRR);
    }
    return 0;
}

// ------------------------------------------------------------ cmd: bounds

int cmd_bounds(const CodeParams& p, uint32_t alpha_max, uint32_t beta_max) {
    validate(p);
    {
        DerivedParams d = derive(p, CodeMode::MSRR);
        const uint64_t bound = cutset_bound(p, d.alpha, std::max<uint32_t>(d.beta, 1));
        std::cout << "extreme mode=MSRR alpha=" << d.alpha << " beta=" << d.beta
                  << " B=" << d.file_size << " bound=" << bound
                  << " match=" << (bound == d.file_size ? "yes" : "no") << "\n";
    }
    if (p.dbar > 0) {
        DerivedParams d = derive(p, CodeMode::MBRR);
        const uint64_t bound = cutset_bound(p, d.alpha, d.beta);
        std::cout << "extreme mode=MBRR alpha=" << d.alpha << " beta=" << d.beta
                  << " B=" << d.file_size << " bound=" << bound
                  << " match=" << (bound == d.file_size ? "yes" : "no") << "\n";
    }
    for (uint32_t a = 1; a <= alpha_max; ++a)
        for (uint32_t b = 1; b <= beta_max; ++b)
            std::cout << "bound alpha=" << a << " beta=" << b
                      << " Bstar=" << cutset_bound(p, a, b) << "\n";
    return 0;
}

// ------------------------------------------------------------ cmd: encode

fs::path chunk_path(const fs::path& dir, uint32_t e, uint32_t g) {
    return dir / ("chunk_" + std::to_string(e) + "_" + std::to_string(g) + ".mrc");
}

int cmd_encode(const std::string& input, const std::string& out_dir, const CodeParams& p,
               CodeMode mode, const std::string& field_str, bool systematic) {
    validate(p);
    const FieldSpec fspec = resolve_field(field_str, p);
    Field field = make_field(fspec);
    Codec codec = Codec::make(p, mode, field);
    const DerivedParams& d = codec.derived();

    std::vector<uint8_t> payload = read_file(input);
    const uint32_t q = field.order();
    const uint32_t bits = data_bits_per_symbol(q);
    const uint32_t width = symbol_width(q);
    const uint64_t stripes = stripe_count(payload.size(), d.file_size, q);

    std::vector<std::vector<uint8_t>> node_bytes(p.n);
    BitReader reader(payload);
    std::vector<Fel> stripe(d.file_size, Fel(0));
    for (uint64_t s = 0; s < stripes; ++s) {
        for (auto& sym : stripe) sym = Fel(reader.take(bits));
        std::vector<Fel> flat = codec.encode_stripe(stripe, systematic);
        for (uint32_t node = 0; node < p.n; ++node)
            for (uint32_t a = 0; a < d.alpha; ++a)
                write_symbol_be(node_bytes[node], flat[node * d.alpha + a].repr(), width);
    }

    fs::create_directories(out_dir);
    ChunkHeader h;
    h.mode = ChunkMode((mode == CodeMode::MBRR ? 1 : 0) | (systematic ? 0 : 2));
    h.field = fspec;
    h.params = p;
    h.payload_bytes = payload.size();
    for (uint32_t e = 0; e < d.nbar; ++e)
        for (uint32_t g = 0; g < p.u; ++g) {
            h.rack = uint16_t(e);
            h.node = uint16_t(g);
            auto hdr = h.serialize();
            std::vector<uint8_t> bytes(hdr.begin(), hdr.end());
            const auto& body = node_bytes[e * p.u + g];
            bytes.insert(bytes.end(), body.begin(), body.end());
            write_file(chunk_path(out_dir, e, g), bytes);
        }
    std::cout << "encoded " << payload.size() << " bytes into " << p.n << " chunks (" << stripes
              << " stripes, mode " << mode_name(mode)
              << (systematic ? ", systematic" : ", plain") << ")\n";
    return 0;
}

// ------------------------------------------------------- chunk-set loading

struct ChunkSet {
    ChunkHeader ref;  // shared header fields of the stripe set
    std::map<uint32_t, std::vector<uint8_t>> bodies;  // node label -> symbol bytes
};

ChunkSet load_chunks(const std::string& dir) {
    ChunkSet set;
    bool first = true;
    if (!fs::is_directory(dir)) throw IoError(dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::vector<uint8_t> bytes = read_file(path);
        if (bytes.size() < ChunkHeader::size ||
            std::memcmp(bytes.data(), ChunkHeader::magic.data(), 8) != 0)
            continue;  // not a chunk file
        ChunkHeader h = ChunkHeader::parse(bytes);
        if (first) {
            set.ref = h;
            first = false;
        } else if (!set.ref.same_stripe_set(h)) {
            throw IoError("chunk " + path.string() + " belongs to a different stripe set");
        }
        const uint32_t label = h.rack * h.params.u + h.node;
        if (set.bodies.count(label))
            throw IoError("duplicate chunk for node " + std::to_string(label));
        set.bodies.emplace(label,
                           std::vector<uint8_t>(bytes.begin() + ChunkHeader::size, bytes.end()));
    }
    if (first) throw IoError("no chunk files found in " + dir);
    return set;
}

// per-node symbol arrays, stripe-major within a node
struct LoadedData {
    uint64_t stripes = 0;
    uint32_t width = 0, bits = 0;
    std::vector<std::vector<Fel>> node_syms;  // label -> stripes * alpha symbols
};

LoadedData decode_bodies(const ChunkSet& set, const Codec& codec) {
    LoadedData ld;
    const Field& f = codec.field();
    const DerivedParams& d = codec.derived();
    ld.width = symbol_width(f.order());
    ld.bits = data_bits_per_symbol(f.order());
    ld.stripes = stripe_count(set.ref.payload_bytes, d.file_size, f.order());
    ld.node_syms.resize(codec.params().n);
    const size_t expect = size_t(ld.stripes) * d.alpha * ld.width;
    for (const auto& [label, body] : set.bodies) {
        if (body.size() != expect)
            throw IoError("chunk for node " + std::to_string(label) + " has wrong length");
        auto& syms = ld.node_syms[label];
        syms.reserve(ld.stripes * d.alpha);
        for (size_t off = 0; off < body.size(); off += ld.width) {
            const uint32_t repr = read_symbol_be(body, off, ld.width);
            if (repr >= f.order())
                throw IoError("chunk for node " + std::to_string(label) +
                              " holds an out-of-range symbol");
            syms.emplace_back(repr);
        }
    }
    return ld;
}

// ------------------------------------------------------------ cmd: decode

int cmd_decode(const std::string& chunk_dir, const std::string& output) {
    ChunkSet set = load_chunks(chunk_dir);
    const CodeParams& p = set.ref.params;
    Field field = make_field(set.ref.field);
    Codec codec = Codec::make(p, code_mode(set.ref.mode), field);
    const DerivedParams& d = codec.derived();

    std::vector<uint32_t> labels;
    for (const auto& [label, body] : set.bodies) labels.push_back(label);
    if (labels.size() < codec.threshold()) {
        std::cerr << "unrecoverable: " << labels.size() << " chunks present, "
                  << codec.threshold() << " needed\n";
        return EXIT_UNRECOVERABLE;
    }
    LoadedData ld = decode_bodies(set, codec);

    BitWriter writer;
    const bool sys = systematic(set.ref.mode);
    if (codec.msrr) {
        MsrrCode::Decoder dec(*codec.msrr, labels);
        std::vector<Fel> vals(labels.size());
        for (uint64_t s = 0; s < ld.stripes; ++s) {
            for (size_t i = 0; i < labels.size(); ++i) vals[i] = ld.node_syms[labels[i]][s];
            std::vector<Fel> word = dec.apply(vals);
            std::vector<Fel> data =
                sys ? codec.msrr->data_readback(word) : codec.msrr->plain_readback(word);
            for (Fel x : data) writer.put(x.repr(), ld.bits);
        }
    } else {
        MbrrCode::Decoder dec(*codec.mbrr, labels);
        std::vector<std::vector<Fel>> rows(labels.size());
        for (uint64_t s = 0; s < ld.stripes; ++s) {
            for (size_t i = 0; i < labels.size(); ++i) {
                auto& syms = ld.node_syms[labels[i]];
                rows[i].assign(syms.begin() + s * d.alpha, syms.begin() + (s + 1) * d.alpha);
            }
            FMatrix m = dec.apply(rows);
            std::vector<Fel> data = sys ? codec.mbrr->data_readback(codec.mbrr->encode(m))
                                        : codec.mbrr->read_message(m);
            for (Fel x : data) writer.put(x.repr(), ld.bits);
        }
    }
    std::vector<uint8_t> bytes = std::move(writer).take();
    bytes.resize(set.ref.payload_bytes);
    write_file(output, bytes);
    std::cout << "decoded " << bytes.size() << " bytes from " << labels.size() << " chunks\n";
    return 0;
}

// ------------------------------------------------------------ cmd: repair

int cmd_repair(const std::string& chunk_dir, const std::string& failed_spec,
               const std::string& helper_spec) {
    ChunkSet set = load_chunks(chunk_dir);
    const CodeParams& p = set.ref.params;
    Field field = make_field(set.ref.field);
    Codec codec = Codec::make(p, code_mode(set.ref.mode), field);
    const DerivedParams& d = codec.derived();

    // failed = explicitly listed plus anything missing on disk
    std::set<uint32_t> failed;
    for (uint32_t label : parse_node_list(failed_spec, p)) failed.insert(label);
    for (uint32_t label = 0; label < p.n; ++label)
        if (!set.bodies.count(label)) failed.insert(label);
    for (uint32_t label : failed) set.bodies.erase(label);

    std::vector<uint32_t> dead(failed.begin(), failed.end());
    const RepairClass cls = classify_pattern(p, d, dead);
    if (cls == RepairClass::unrecoverable) {
        std::cerr << "summary class=unrecoverable failures=" << dead.size() << "\n";
        return EXIT_UNRECOVERABLE;
    }
    LoadedData ld = decode_bodies(set, codec);
    const std::vector<uint32_t> preferred = parse_rack_list(helper_spec);

    std::vector<bool> alive(p.n, true);
    for (uint32_t label : dead) {
        alive[label] = false;
        ld.node_syms[label].assign(size_t(ld.stripes) * d.alpha, Fel(0));
    }
    uint64_t total_cross = 0, total_intra = 0, events = 0;

    auto pick_helpers = [&](uint32_t host) {
        std::vector<uint32_t> clean;
        auto is_clean = [&](uint32_t e) {
            if (e == host || e >= d.nbar) return false;
            for (uint32_t g = 0; g < p.u; ++g)
                if (!alive[e * p.u + g]) return false;
            return true;
        };
        for (uint32_t e : preferred)
            if (is_clean(e) && std::find(clean.begin(), clean.end(), e) == clean.end())
                clean.push_back(e);
        for (uint32_t e = 0; e < d.nbar && clean.size() < p.dbar; ++e)
            if (is_clean(e) && std::find(clean.begin(), clean.end(), e) == clean.end())
                clean.push_back(e);
        if (clean.size() < p.dbar)
            throw UnrecoverableError("not enough failure-free helper racks");
        clean.resize(p.dbar);
        return clean;
    };

    if (cls == RepairClass::optimal) {
        for (uint32_t host = 0; host < d.nbar; ++host) {
            std::vector<uint32_t> failed_g;
            for (uint32_t g = 0; g < p.u; ++g)
                if (!alive[host * p.u + g]) failed_g.push_back(g);
            if (failed_g.empty()) continue;
            std::vector<uint32_t> locals;
            for (uint32_t g = 0; g < p.u && locals.size() < p.l; ++g)
                if (alive[host * p.u + g]) locals.push_back(g);
            std::vector<uint32_t> helpers = pick_helpers(host);

            uint64_t cross = 0;
            if (codec.msrr) {
                auto plan = codec.msrr->repair_plan(host, failed_g, locals, helpers);
                for (uint64_t s = 0; s < ld.stripes; ++s) {
                    std::map<uint32_t, std::vector<Fel>> contribs;
                    for (uint32_t e : plan.helper_racks) {
                        std::vector<Fel> rack(p.u);
                        for (uint32_t g = 0; g < p.u; ++g) rack[g] = ld.node_syms[e * p.u + g][s];
                        auto v = codec.msrr->helper_contribution(plan, e, rack);
                        if (s == 0) cross += v.size();
                        contribs.emplace(e, std::move(v));
                    }
                    std::vector<Fel> loc(plan.locals.size());
                    for (size_t i = 0; i < plan.locals.size(); ++i)
                        loc[i] = ld.node_syms[host * p.u + plan.locals[i]][s];
                    std::vector<Fel> fixed = codec.msrr->repair(plan, contribs, loc);
                    for (size_t i = 0; i < plan.failed.size(); ++i)
                        ld.node_syms[host * p.u + plan.failed[i]][s] = fixed[i];
                }
            } else {
                auto plan = codec.mbrr->repair_plan(host, failed_g, locals, helpers);
                for (uint64_t s = 0; s < ld.stripes; ++s) {
                    std::map<uint32_t, std::vector<Fel>> contribs;
                    for (uint32_t e : plan.helper_racks) {
                        std::vector<std::vector<Fel>> rack(p.u);
                        for (uint32_t g = 0; g < p.u; ++g) {
                            auto& syms = ld.node_syms[e * p.u + g];
                            rack[g].assign(syms.begin() + s * d.alpha,
                                           syms.begin() + (s + 1) * d.alpha);
                        }
                        auto v = codec.mbrr->helper_contribution(plan, e, rack);
                        if (s == 0) cross += v.size();
                        contribs.emplace(e, std::move(v));
                    }
                    std::vector<std::vector<Fel>> loc(plan.locals.size());
                    for (size_t i = 0; i < plan.locals.size(); ++i) {
                        auto& syms = ld.node_syms[host * p.u + plan.locals[i]];
                        loc[i].assign(syms.begin() + s * d.alpha,
                                      syms.begin() + (s + 1) * d.alpha);
                    }
                    auto fixed = codec.mbrr->repair(plan, contribs, loc);
                    for (size_t i = 0; i < plan.failed.size(); ++i)
                        for (uint32_t a = 0; a < d.alpha; ++a)
                            ld.node_syms[host * p.u + plan.failed[i]][s * d.alpha + a] =
                                fixed[i][a];
                }
            }
            for (uint32_t g : failed_g) alive[host * p.u + g] = true;
            const uint64_t intra =
                uint64_t(p.l) * d.alpha + uint64_t(p.dbar) * (p.u - 1) * d.alpha;
            total_cross += cross;
            total_intra += intra;
            ++events;
            std::cout << "event mode=optimal host=" << host << " h=" << failed_g.size()
                      << " helpers=" << join(helpers) << " cross_rack=" << cross
                      << " intra_rack=" << intra << " stripes=" << ld.stripes << "\n";
        }
    } else {
        // naive: re-read k survivors, regenerate everything that is missing
        std::vector<uint32_t> read;
        for (uint32_t label = 0; label < p.n && read.size() < p.k; ++label)
            if (alive[label]) read.push_back(label);
        uint32_t site = read.front() / p.u;
        uint64_t cross = 0, intra = 0;
        for (uint32_t label : read) (label / p.u == site ? intra : cross) += d.alpha;

        if (codec.msrr) {
            MsrrCode::Decoder dec(*codec.msrr, read);
            std::vector<Fel> vals(read.size());
            for (uint64_t s = 0; s < ld.stripes; ++s) {
                for (size_t i = 0; i < read.size(); ++i) vals[i] = ld.node_syms[read[i]][s];
                std::vector<Fel> word = dec.apply(vals);
                for (uint32_t label : dead) ld.node_syms[label][s] = word[label];
            }
        } else {
            MbrrCode::Decoder dec(*codec.mbrr, read);
            std::vector<std::vector<Fel>> rows(read.size());
            for (uint64_t s = 0; s < ld.stripes; ++s) {
                for (size_t i = 0; i < read.size(); ++i) {
                    auto& syms = ld.node_syms[read[i]];
                    rows[i].assign(syms.begin() + s * d.alpha, syms.begin() + (s + 1) * d.alpha);
                }
                FMatrix cw = codec.mbrr->encode(dec.apply(rows));
                for (uint32_t label : dead)
                    for (uint32_t a = 0; a < d.alpha; ++a)
                        ld.node_syms[label][s * d.alpha + a] = cw.at(label, a);
            }
        }
        for (uint32_t label : dead) alive[label] = true;
        total_cross = cross;
        total_intra = intra;
        events = 1;
        std::cout << "event mode=naive host=" << site << " h=" << dead.size()
                  << " helpers=none cross_rack=" << cross << " intra_rack=" << intra
                  << " stripes=" << ld.stripes << "\n";
    }

    // write the regenerated chunks byte-identically
    ChunkHeader h = set.ref;
    for (uint32_t label : dead) {
        h.rack = uint16_t(label / p.u);
        h.node = uint16_t(label % p.u);
        auto hdr = h.serialize();
        std::vector<uint8_t> bytes(hdr.begin(), hdr.end());
        for (uint64_t s = 0; s < ld.stripes; ++s)
            for (uint32_t a = 0; a < d.alpha; ++a)
                write_symbol_be(bytes, ld.node_syms[label][s * d.alpha + a].repr(), ld.width);
        write_file(chunk_path(chunk_dir, h.rack, h.node), bytes);
    }
    std::cout << "summary class=" << repair_class_name(cls) << " failures=" << dead.size()
              << " events=" << events << " cross_rack=" << total_cross
              << " intra_rack=" << total_intra << "\n";
    return 0;
}

// ---------------------------------------------------------- cmd: simulate

FailurePattern parse_spread(const std::string& s, const CodeParams& p) {
    const size_t x = s.find('x');
    if (x == std::string::npos) throw ParamError("spread spec must be RACKSxFAILURES");
    const uint32_t racks = uint32_t(std::stoul(s.substr(0, x)));
    const uint32_t per = uint32_t(std::stoul(s.substr(x + 1)));
    if (racks > p.n / p.u || per > p.u) throw ParamError("spread exceeds the grid");
    FailurePattern pat;
    for (uint32_t e = 0; e < racks; ++e)
        for (uint32_t g = 0; g < per; ++g) pat.nodes.push_back(e * p.u + g);
    return pat;
}

template <class Code>
int simulate_with(const Code& code, const std::vector<FailurePattern>& patterns,
                  HelperPolicy policy, uint64_t seed, std::mt19937_64& rng) {
    const Field& f = code.field();
    std::vector<Fel> data(code.derived().file_size);
    for (auto& x : data) x = Fel(uint32_t(rng() % f.order()));

    uint64_t n_opt = 0, n_naive = 0, n_unrec = 0, cross_total = 0, intra_total = 0;
    int rc = 0;
    for (size_t t = 0; t < patterns.size(); ++t) {
        Cluster<Code> cluster(code, data);
        RepairClass cls = cluster.classify(patterns[t]);
        if (cls == RepairClass::unrecoverable) {
            ++n_unrec;
            std::cout << "summary trial=" << t << " class=unrecoverable failures="
                      << patterns[t].nodes.size() << " events=0 cross_rack=0 intra_rack=0\n";
            if (patterns.size() == 1) rc = EXIT_UNRECOVERABLE;
            continue;
        }
        RepairReport rep = cluster.run_repair(patterns[t], policy, seed + t);
        (rep.mode == RepairClass::optimal ? n_opt : n_naive) += 1;
        for (const auto& ev : rep.events)
            std::cout << "event trial=" << t << " mode=" << repair_class_name(rep.mode)
                      << " host=" << ev.host << " h=" << ev.h
                      << " helpers=" << join(ev.helper_racks)
                      << " cross_rack=" << ev.cross_symbols
                      << " intra_rack=" << ev.intra_symbols << "\n";
        std::cout << "summary trial=" << t << " class=" << repair_class_name(rep.mode)
                  << " failures=" << rep.failures << " events=" << rep.events.size()
                  << " cross_rack=" << rep.cross_rack_symbols
                  << " intra_rack=" << rep.intra_rack_symbols << "\n";
        cross_total += rep.cross_rack_symbols;
        intra_total += rep.intra_rack_symbols;
    }
    std::cout << "aggregate trials=" << patterns.size() << " optimal=" << n_opt
              << " naive=" << n_naive << " unrecoverable=" << n_unrec
              << " cross_rack_total=" << cross_total << " intra_rack_total=" << intra_total
              << "\n";
    return rc;
}

int cmd_simulate(const CodeParams& p, CodeMode mode, const std::string& field_str,
                 const std::string& pattern_spec, const std::string& spread_spec,
                 uint32_t random_failures, uint32_t trials, uint64_t seed,
                 const std::string& policy_str) {
    validate(p);
    Field field = make_field(resolve_field(field_str, p));
    const HelperPolicy policy =
        policy_str == "random" ? HelperPolicy::random_seeded : HelperPolicy::lowest_index;

    std::mt19937_64 rng(seed);
    std::vector<FailurePattern> patterns;
    if (!pattern_spec.empty()) {
        patterns.push_back({parse_node_list(pattern_spec, p)});
    } else if (!spread_spec.empty()) {
        patterns.push_back(parse_spread(spread_spec, p));
    } else if (random_failures > 0) {
        if (random_failures > p.n) throw ParamError("more failures than nodes");
        for (uint32_t t = 0; t < std::max<uint32_t>(trials, 1); ++t) {
            std::vector<uint32_t> pool(p.n);
            for (uint32_t i = 0; i < p.n; ++i) pool[i] = i;
            std::shuffle(pool.begin(), pool.end(), rng);
            patterns.push_back(
                {std::vector<uint32_t>(pool.begin(), pool.begin() + random_failures)});
        }
    } else {
        throw ParamError("one of --pattern, --spread, --random-failures is required");
    }

    if (mode == CodeMode::MSRR) {
        MsrrCode code(p, field);
        return simulate_with(code, patterns, policy, seed, rng);
    }
    MbrrCode code(p, field);
    return simulate_with(code, patterns, policy, seed, rng);
}

// ------------------------------------------------------------------ main

struct Cli {
    CodeParams p{};
    std::string mode = "msrr";
    std::string params_mode = "both";
    std::string field = "auto";
    std::string input, output, chunk_dir, out_dir;
    std::string pattern, spread, failed, helpers;
    std::string policy = "lowest";
    bool systematic = true;
    uint32_t alpha_max = 4, beta_max = 4;
    uint32_t random_failures = 0, trials = 1;
    uint64_t seed = 0;
};

void add_param_options(CLI::App* sub, Cli& o) {
    sub->add_option("--n", o.p.n, "total node count")->required();
    sub->add_option("--u", o.p.u, "nodes per rack")->required();
    sub->add_option("--k", o.p.k, "reconstruction threshold")->required();
    sub->add_option("--l", o.p.l, "intra-rack helper threshold")->required();
    sub->add_option("--dbar", o.p.dbar, "helper rack count")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rack-aware regenerating codes: encode, repair, simulate, bound"};
    app.require_subcommand(1);
    Cli o;

    auto* sub_params = app.add_subcommand("params", "derived parameters and overheads");
    add_param_options(sub_params, o);
    sub_params->add_option("--mode", o.params_mode, "msrr | mbrr | both")
        ->check(CLI::IsMember({"msrr", "mbrr", "both"}));

    auto* sub_bounds = app.add_subcommand("bounds", "cut-set bound table and extreme points");
    add_param_options(sub_bounds, o);
    sub_bounds->add_option("--alpha-max", o.alpha_max, "largest alpha in the table");
    sub_bounds->add_option("--beta-max", o.beta_max, "largest beta in the table");

    auto* sub_encode = app.add_subcommand("encode", "split a file into coded chunks");
    sub_encode->add_option("--input", o.input, "payload file")->required();
    sub_encode->add_option("--out", o.out_dir, "chunk directory")->required();
    add_param_options(sub_encode, o);
    sub_encode->add_option("--mode", o.mode, "code family")
        ->check(CLI::IsMember({"msrr", "mbrr"}));
    sub_encode->add_option("--field", o.field, "auto | <prime> | 2^m[:poly]");
    sub_encode->add_flag("--systematic,!--plain", o.systematic,
                         "information-set placement (default) or plain encoding");

    auto* sub_decode = app.add_subcommand("decode", "rebuild the payload from chunks");
    sub_decode->add_option("--chunks", o.chunk_dir, "chunk directory")->required();
    sub_decode->add_option("--output", o.output, "output file")->required();

    auto* sub_repair = app.add_subcommand("repair", "regenerate failed chunks in place");
    sub_repair->add_option("--chunks", o.chunk_dir, "chunk directory")->required();
    sub_repair->add_option("--failed", o.failed, "failed nodes e:g,e:g (missing files imply)");
    sub_repair->add_option("--helpers", o.helpers, "preferred helper racks r1,r2,...");

    auto* sub_sim = app.add_subcommand("simulate", "failure injection and repair campaigns");
    add_param_options(sub_sim, o);
    sub_sim->add_option("--mode", o.mode, "code family")->check(CLI::IsMember({"msrr", "mbrr"}));
    sub_sim->add_option("--field", o.field, "auto | <prime> | 2^m[:poly]");
    sub_sim->add_option("--pattern", o.pattern, "explicit failures e:g,e:g");
    sub_sim->add_option("--spread", o.spread, "RACKSxFAILURES uniform pattern");
    sub_sim->add_option("--random-failures", o.random_failures, "random failures per trial");
    sub_sim->add_option("--trials", o.trials, "number of random trials");
    sub_sim->add_option("--seed", o.seed, "campaign seed");
    sub_sim->add_option("--policy", o.policy, "helper-rack policy")
        ->check(CLI::IsMember({"lowest", "random"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : EXIT_PARAM;
    }

    const CodeMode mode = o.mode == "mbrr" ? CodeMode::MBRR : CodeMode::MSRR;
    try {
        if (sub_params->parsed()) return cmd_params(o.p, o.params_mode);
        if (sub_bounds->parsed()) return cmd_bounds(o.p, o.alpha_max, o.beta_max);
        if (sub_encode->parsed())
            return cmd_encode(o.input, o.out_dir, o.p, mode, o.field, o.systematic);
        if (sub_decode->parsed()) return cmd_decode(o.chunk_dir, o.output);
        if (sub_repair->parsed()) return cmd_repair(o.chunk_dir, o.failed, o.helpers);
        if (sub_sim->parsed())
            return cmd_simulate(o.p, mode, o.field, o.pattern, o.spread, o.random_failures,
                                o.trials, o.seed, o.policy);
    } catch (const ParamError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return EXIT_PARAM;
    } catch (const FieldError& e) {
        std::cerr << "field error: " << e.what() << "\n";
        return EXIT_PARAM;
    } catch (const UnrecoverableError& e) {
        std::cerr << "unrecoverable: " << e.what() << "\n";
        return EXIT_UNRECOVERABLE;
    } catch (const InsufficientDataError& e) {
        std::cerr << "unrecoverable: " << e.what() << "\n";
        return EXIT_UNRECOVERABLE;
    } catch (const InconsistentDataError& e) {
        std::cerr << "io error (corrupt chunks): " << e.what() << "\n";
        return EXIT_IO;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return EXIT_IO;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
