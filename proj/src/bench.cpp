#include "tomo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tomo/datadir.hpp"

namespace tomo {

namespace {

bool is_excluded(const std::string& cls, const std::vector<std::string>& exclusions) {
    return std::find(exclusions.begin(), exclusions.end(), cls) != exclusions.end();
}

}  // namespace

PredictionSet parse_predictions(const std::string& text, const std::string& source) {
    PredictionSet set;
    set.source = source;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        PredictionEntry e;
        ls >> e.class_id >> e.position[0] >> e.position[1] >> e.position[2];
        if (!ls)
            throw std::runtime_error("parse_predictions: malformed line " +
                                     std::to_string(line_no));
        if (ls >> e.score) e.has_score = true;
        set.entries.push_back(e);
    }
    return set;
}

std::string format_predictions(const PredictionSet& preds) {
    std::ostringstream out;
    out.precision(10);
    for (const auto& e : preds.entries) {
        out << e.class_id << ' ' << e.position[0] << ' ' << e.position[1] << ' '
            << e.position[2];
        if (e.has_score) out << ' ' << e.score;
        out << '\n';
    }
    return out.str();
}

MatchReport match_predictions(const PredictionSet& preds, const BenchGroundTruth& gt,
                              const MatchOptions& opt) {
    const bool use_mask = gt.occupancy.size() > 0;
    if (!use_mask && opt.fallback_radius_vox <= 0)
        throw std::runtime_error(
            "match_predictions: ground truth has no occupancy mask; set fallback_radius_vox to "
            "use the non-canonical radius matcher");

    const size_t n_inst = gt.entries.size();
    std::vector<char> excluded_inst(n_inst + 1, 0);
    for (size_t i = 0; i < n_inst; ++i)
        if (is_excluded(gt.entries[i].class_id, opt.exclusions))
            excluded_inst[i + 1] = 1;

    MatchReport rep;
    std::vector<int64_t> hits(n_inst + 1, 0);
    double dist_sum = 0;

    for (const auto& e : preds.entries) {
        if (is_excluded(e.class_id, opt.exclusions)) {
            rep.assignment.push_back(-1);
            continue;
        }

        int inst = 0;
        bool out_of_bounds = false;
        if (use_mask) {
            const int i = static_cast<int>(std::lround(e.position[0]));
            const int j = static_cast<int>(std::lround(e.position[1]));
            const int k = static_cast<int>(std::lround(e.position[2]));
            if (!gt.occupancy.contains(i, j, k)) {
                out_of_bounds = true;
            } else {
                inst = gt.occupancy.at(i, j, k);
                if (inst < 0 || inst > static_cast<int>(n_inst)) inst = 0;
            }
        } else {
            double best = opt.fallback_radius_vox;
            for (size_t gi = 0; gi < n_inst; ++gi) {
                const double d = norm(e.position - gt.entries[gi].position);
                if (d <= best) {
                    best = d;
                    inst = static_cast<int>(gi) + 1;
                }
            }
        }

        if (inst > 0 && excluded_inst[inst]) {  // landed on an excluded particle: discarded
            rep.assignment.push_back(-1);
            continue;
        }

        ++rep.rr;
        if (out_of_bounds) {
            rep.warnings.push_back("prediction outside tomogram bounds counted as FP");
            ++rep.fp;
            rep.assignment.push_back(0);
            rep.hit_pairs.emplace_back("", e.class_id);
            continue;
        }
        rep.assignment.push_back(inst);
        if (inst == 0) {
            ++rep.fp;
            rep.hit_pairs.emplace_back("", e.class_id);
            continue;
        }
        rep.hit_pairs.emplace_back(gt.class_of(inst), e.class_id);
        ++hits[inst];
        if (hits[inst] == 1) {
            ++rep.tp;
            dist_sum += norm(e.position - gt.entries[inst - 1].position);
        } else {
            ++rep.extra_hits;
        }
    }

    for (size_t i = 1; i <= n_inst; ++i) {
        if (excluded_inst[i]) continue;
        ++rep.total_particles;
        if (hits[i] == 0) ++rep.fn;
        if (hits[i] > 1) ++rep.mh;
    }
    rep.ad = rep.tp > 0 ? dist_sum / rep.tp : 0.0;
    return rep;
}

Metrics compute_metrics(int64_t rr, int64_t tp, int64_t fn, int64_t total_particles) {
    const int64_t total = total_particles >= 0 ? total_particles : tp + fn;
    Metrics m;
    m.recall = total > 0 ? static_cast<double>(tp) / total : 0.0;
    m.precision = rr > 0 ? static_cast<double>(tp) / rr : 0.0;
    m.miss_rate = 1.0 - m.recall;
    m.f1 = (m.precision + m.recall) > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

Metrics compute_metrics(const MatchReport& report) {
    return compute_metrics(report.rr, report.tp, report.fn, report.total_particles);
}

std::map<std::string, PerClassResult> per_class_results(const PredictionSet& preds,
                                                        const BenchGroundTruth& gt,
                                                        const MatchOptions& opt) {
    const MatchReport rep = match_predictions(preds, gt, opt);

    std::map<std::string, PerClassResult> out;
    for (const auto& e : gt.entries)
        if (!is_excluded(e.class_id, opt.exclusions)) ++out[e.class_id].gt_count;

    // class-correct first hits per instance
    std::set<int> class_hit;  // instances already hit by a correct-class prediction
    for (size_t pi = 0; pi < preds.entries.size(); ++pi) {
        const auto& e = preds.entries[pi];
        const int inst = rep.assignment[pi];
        if (inst < 0) continue;  // excluded or discarded
        ++out[e.class_id].rr;
        if (inst > 0 && gt.class_of(inst) == e.class_id && !class_hit.count(inst)) {
            class_hit.insert(inst);
            ++out[e.class_id].tp;
        }
    }
    for (auto& [cls, r] : out) {
        r.fn = r.gt_count - r.tp;
        if (r.gt_count > 0 || r.rr > 0) {
            if (r.gt_count == 0) {
                r.metrics.reset();  // class absent from ground truth: not applicable
            } else {
                r.metrics = compute_metrics(r.rr, r.tp, r.fn, r.gt_count);
            }
        }
    }
    return out;
}

ClassWeights ClassWeights::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("ClassWeights: cannot open " + path);
    ClassWeights w;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string cls, weight_s;
        double r_eff;
        ls >> cls >> weight_s >> r_eff;
        if (!ls) throw std::runtime_error("ClassWeights: malformed row '" + line + "'");
        double weight = std::nan("");
        if (weight_s != "-") weight = std::stod(weight_s);
        w.rows_[cls] = {weight, r_eff};
    }
    return w;
}

const ClassWeights& ClassWeights::bundled() {
    static const ClassWeights w = load(data_file("particle_classes.txt"));
    return w;
}

std::optional<double> ClassWeights::weight(const std::string& class_id) const {
    auto it = rows_.find(class_id);
    if (it == rows_.end() || std::isnan(it->second.first)) return std::nullopt;
    return it->second.first;
}

double ClassWeights::r_eff_nm(const std::string& class_id) const {
    auto it = rows_.find(class_id);
    if (it == rows_.end())
        throw std::runtime_error("ClassWeights: unknown class '" + class_id + "'");
    return it->second.second;
}

std::vector<std::string> ClassWeights::order_by_weight(
    const std::vector<std::string>& classes) const {
    std::vector<std::string> out = classes;
    std::stable_sort(out.begin(), out.end(), [this](const std::string& a, const std::string& b) {
        const auto wa = weight(a), wb = weight(b);
        if (wa && wb) return *wa < *wb;
        if (wa && !wb) return true;  // weightless classes last
        if (!wa && wb) return false;
        return a < b;
    });
    return out;
}

GroupF1 group_f1(const std::map<std::string, double>& f1_by_class, const ClassWeights& weights) {
    GroupF1 g;
    double s = 0, m = 0, l = 0;
    for (const auto& [cls, f1] : f1_by_class) {
        const auto w = weights.weight(cls);
        if (!w) continue;
        if (*w < 200.0) {
            s += f1;
            ++g.n_small;
        } else if (*w <= 600.0) {
            m += f1;
            ++g.n_medium;
        } else {
            l += f1;
            ++g.n_large;
        }
    }
    g.small = g.n_small ? s / g.n_small : 0.0;
    g.medium = g.n_medium ? m / g.n_medium : 0.0;
    g.large = g.n_large ? l / g.n_large : 0.0;
    return g;
}

int64_t ConfusionMatrix::at(const std::string& true_class, const std::string& predicted) const {
    const auto col = std::find(classes.begin(), classes.end(), predicted);
    if (col == classes.end()) return 0;
    size_t row = classes.size();  // background row
    if (!true_class.empty()) {
        const auto r = std::find(classes.begin(), classes.end(), true_class);
        if (r == classes.end()) return 0;
        row = static_cast<size_t>(r - classes.begin());
    }
    return counts[row][static_cast<size_t>(col - classes.begin())];
}

ConfusionMatrix confusion_matrix(const PredictionSet& preds, const BenchGroundTruth& gt,
                                 const MatchOptions& opt, const ClassWeights& weights) {
    const MatchReport rep = match_predictions(preds, gt, opt);

    std::set<std::string> class_set;
    for (const auto& e : gt.entries)
        if (!is_excluded(e.class_id, opt.exclusions)) class_set.insert(e.class_id);
    for (const auto& [t, p] : rep.hit_pairs) class_set.insert(p);

    ConfusionMatrix cm;
    cm.classes = weights.order_by_weight({class_set.begin(), class_set.end()});
    cm.counts.assign(cm.classes.size() + 1, std::vector<int64_t>(cm.classes.size(), 0));

    auto col_of = [&](const std::string& cls) {
        return static_cast<size_t>(
            std::find(cm.classes.begin(), cm.classes.end(), cls) - cm.classes.begin());
    };
    for (const auto& [true_cls, pred_cls] : rep.hit_pairs) {
        const size_t row = true_cls.empty() ? cm.classes.size() : col_of(true_cls);
        cm.counts[row][col_of(pred_cls)] += 1;
    }
    return cm;
}

std::vector<std::pair<std::string, double>> cumulative_f1(
    const std::map<std::string, double>& f1_by_class, const std::vector<std::string>& order) {
    std::vector<std::pair<std::string, double>> out;
    double run = 0;
    for (const auto& cls : order) {
        auto it = f1_by_class.find(cls);
        if (it != f1_by_class.end()) run += it->second;
        out.emplace_back(cls, run);
    }
    return out;
}

RowCheck check_published_row(const PublishedRow& row, int64_t total_particles, double tolerance) {
    RowCheck c;
    c.derived = compute_metrics(row.rr, row.tp, row.fn, total_particles);
    auto flag = [&](const char* what, double printed, double derived) {
        if (std::abs(printed - derived) > tolerance)
            c.inconsistencies.push_back(row.method + ": printed " + what + " " +
                                        std::to_string(printed) + " differs from derived " +
                                        std::to_string(derived));
    };
    flag("recall", row.recall, c.derived.recall);
    flag("precision", row.precision, c.derived.precision);
    flag("miss rate", row.miss_rate, c.derived.miss_rate);
    flag("f1", row.f1, c.derived.f1);
    if (std::abs(row.miss_rate - (1.0 - row.recall)) > tolerance)
        c.inconsistencies.push_back(row.method +
                                    ": printed miss rate is not 1 - printed recall");
    if (row.tp + row.fn != total_particles)
        c.inconsistencies.push_back(row.method + ": TP + FN != stated particle count");
    return c;
}

}  // namespace tomo
