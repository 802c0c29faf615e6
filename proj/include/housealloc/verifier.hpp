#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "housealloc/axioms.hpp"
#include "housealloc/linsys.hpp"
#include "housealloc/matrix.hpp"
#include "housealloc/mechanisms.hpp"
#include "housealloc/prefs.hpp"

namespace housealloc {

enum class Outcome { UniqueEqualsRSD, UniqueDiffersFromRSD, Underdetermined, Infeasible };

std::string outcome_name(Outcome o);

// Per-entry facts about canonical profiles, stamped with the fixpoint round
// that established them. A read horizon limits visibility to strictly earlier
// rounds, which keeps every round schedule-independent.
class DeterminedDB {
public:
    DeterminedDB() = default;
    DeterminedDB(int n, int m) : n_(n), m_(m) {}

    int agents() const { return n_; }
    int houses() const { return m_; }

    void record(const Profile& canonical, int agent, House h, Rational value, int round);
    void set_read_horizon(int round) { horizon_ = round; }  // -1: everything visible
    int read_horizon() const { return horizon_; }

    // Lookups accept any profile and resolve through its canonical orbit.
    std::optional<Rational> entry_for(const Profile& q, int agent, House h) const;
    bool determined(const Profile& q) const;
    std::optional<AssignmentMatrix> matrix_for(const Profile& q) const;
    // Round in which the profile became fully determined (max entry stamp).
    std::optional<int> round_for(const Profile& q) const;

private:
    struct Fact {
        Rational value;
        int round;
    };
    struct Slot {
        std::vector<std::optional<Fact>> facts;
    };
    const Slot* find(const Profile& q, std::vector<int>& sigma, std::vector<int>& pi) const;

    int n_ = 0, m_ = 0;
    int horizon_ = -1;
    std::map<std::string, Slot> slots_;  // keyed by canonical profile string
};

struct CertificateStep {
    enum class Reason { Efficiency, Eta, SpImport, AgentComplement, HouseComplement, SolvedJointly };
    Cell cell;
    Reason reason;
    int eta_id = -1;                      // Eta: index into eta_constraints(p)
    std::optional<SpSource> import_from;  // SpImport: source profile and swap
    int source_level = -1;                // SpImport: disagreement parameter of the source
    int system_id = -1;                   // SolvedJointly: solve round
};

std::string reason_name(CertificateStep::Reason r);

// Replayable record of how each matrix entry was pinned; the machine analogue
// of a worked determination table.
struct DeterminationCertificate {
    Profile profile;
    std::vector<CertificateStep> steps;
    AssignmentMatrix final_matrix;
};

struct ProfileRecord {
    Profile profile;
    std::uint64_t orbit_size = 0;
    int level = 0;  // disagreement parameter
    std::optional<bool> supported;
    bool near_unanimous = false;
    bool degenerate = false;
    Outcome outcome = Outcome::Underdetermined;
    int round = 0;                 // fixpoint round of full determination
    int underdetermined_dim = 0;   // affine dimension when Underdetermined
    std::vector<std::optional<Rational>> matrix_entries;  // row-major; null if unknown
    DeterminationCertificate certificate;                 // empty unless determined
};

struct VerifyOptions {
    int threads = 0;  // 0: hardware concurrency
    std::function<void(const std::string&)> progress;
};

struct VerificationReport {
    int n = 0, m = 0;
    std::uint64_t total_profiles = 0;
    int max_round = 0;
    std::uint64_t count_unique_equals_rsd = 0;
    std::uint64_t count_unique_differs = 0;
    std::uint64_t count_underdetermined = 0;
    std::uint64_t count_infeasible = 0;
    std::vector<ProfileRecord> records;  // canonical profiles, sorted by (level, profile)
    std::shared_ptr<const DeterminedDB> db;

    bool all_unique_equals_rsd() const {
        return count_unique_equals_rsd == records.size();
    }
    std::optional<AssignmentMatrix> matrix_for(const Profile& any) const {
        return db->matrix_for(any);
    }
    std::string to_jsonl() const;
    std::string summary_csv() const;
};

// Assembles the axiom system at p: forced zeros, equal-treatment equalities,
// swap-neighbor imports of every entry the database already knows (values for
// houses outside the swapped pair; the pair sum when both sides are known),
// and row/column complementarity. Variables are indexed agent * m + house.
LinearSystem build_constraints(const Profile& p, const DeterminedDB& db);

// Processes every canonical profile through global fixpoint rounds. Each
// round solves all undetermined profiles against the facts of strictly
// earlier rounds and merges newly pinned entries at a barrier, so reports are
// independent of thread count. Rounds continue until no entry is added.
VerificationReport verify_theorem(int n, int m, const VerifyOptions& opts = {});

// Minimal ordered reason list whose replay pins every entry of p's matrix.
// Requires p fully determined in db.
DeterminationCertificate certify(const Profile& p, const DeterminedDB& db);

// True iff applying the steps in order, using only the cited source profiles'
// matrices, reconstructs final_matrix exactly and final_matrix satisfies the
// assignment-matrix invariants.
bool replay_certificate(const DeterminationCertificate& cert, const DeterminedDB& db,
                        std::string* diagnostic = nullptr);

}  // namespace housealloc
