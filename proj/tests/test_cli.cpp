#include <doctest.h>

#include "cli.hpp"
#include "pcfit/families.hpp"
#include "pcfit/matrices.hpp"
#include "pcfit/splits.hpp"
#include "pcfit/trees.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pcfit;
namespace fs = std::filesystem;

namespace {

const char* kDQ =
    "4\n"
    "1 0 2 3 3\n"
    "2 2 0 3 3\n"
    "3 3 3 0 2\n"
    "4 3 3 2 0\n";

const char* kE5 =
    "5\n"
    "1 0 3 4 3 3\n"
    "2 3 0 3 4 4\n"
    "3 4 3 0 3 3\n"
    "4 3 4 3 0 2\n"
    "5 3 4 3 2 0\n";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() {
        dir_ = fs::temp_directory_path() / ("pcfit-cli-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
        return path(name);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

private:
    fs::path dir_;
};

}  // namespace

TEST_CASE("check") {
    Scratch s;
    std::string dq = s.write("dq.dist", kDQ);
    Run r = run({"check", "--input", dq});
    CHECK(r.code == 0);
    CHECK(r.out.find("four-point: yes\n") != std::string::npos);
    CHECK(r.out.find("kalmanson: yes (ring 1,2,3,4)\n") != std::string::npos);

    Run wrong = run({"check", "--input", dq, "--ordering", "1,3,2,4"});
    CHECK(wrong.code == 1);
    CHECK(wrong.out.find("kalmanson: no (ring 1,3,2,4, quartet 1,3,2,4") != std::string::npos);

    // Four-point fails; the search still finds a ring on four taxa.
    std::string v = s.write("v.dist",
                            "4\n1 0 1 3 5\n2 1 0 6 4\n3 3 6 0 2\n4 5 4 2 0\n");
    Run fp = run({"check", "--input", v});
    CHECK(fp.code == 0);
    CHECK(fp.out.find("four-point: no (quartet") != std::string::npos);
    CHECK(fp.out.find("kalmanson: yes (ring 1,2,4,3)") != std::string::npos);
}

TEST_CASE("gromov and decompose") {
    Scratch s;
    std::string dq = s.write("dq.dist", kDQ);
    Run g = run({"gromov", "--input", dq, "--base", "4"});
    CHECK(g.code == 0);
    CHECK(parse_symmetric_matrix(g.out) == gromov_product(parse_dissimilarity(kDQ), 3));

    Run d = run({"decompose", "--input", dq, "--ordering", "1,2,3,4"});
    CHECK(d.code == 0);
    CHECK(d.out == "1|2,3,4 1\n1,2|3,4 1\n1,2,3|4 1\n1,2,4|3 1\n1,3,4|2 1\n");

    Run p = run({"pyramid", "--input", dq});
    CHECK(p.code == 0);
    CHECK(p.out == "1: -3\n1,2: -2\n1,2,3: -1\n2: -3\n3: -2\n");
    Run ps = run({"pyramid", "--input", dq, "--format", "splits"});
    CHECK(ps.code == 0);
    CHECK(ps.out == d.out);
}

TEST_CASE("pctree writes newick, text, splits and dot") {
    Scratch s;
    std::string dq = s.write("dq.dist", kDQ);
    Run r = run({"pctree", "--input", dq, "--base", "4", "--out", s.path("tree.nwk"), "--dot",
                 s.path("tree.dot")});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(s.read("tree.nwk") == "((3,4)P,1,2)P!;\n");
    CHECK(s.read("tree.dot").rfind("graph pctree {", 0) == 0);
    const TaxonSet taxa = TaxonSet::numbered(4);
    CHECK_NOTHROW(parse_pc_tree(s.read("tree.nwk"), &taxa));

    std::string e5 = s.write("e5.dist", kE5);
    Run t = run({"pctree", "--input", e5, "--format", "text"});
    CHECK(t.code == 0);
    CHECK(t.out.find("tree: ((4,5)P,1,2,3)C!;") != std::string::npos);
    CHECK(t.out.find("1,2,3|4,5 0") != std::string::npos);

    Run sp = run({"pctree", "--input", e5, "--format", "splits"});
    CHECK(sp.code == 0);
    WeightedSplitSystem w = parse_weighted_split_system(sp.out);
    CHECK(evaluate(w).reordered(TaxonSet::numbered(5)) == parse_dissimilarity(kE5));
}

TEST_CASE("verify and export-dot") {
    Scratch s;
    std::string e5 = s.write("e5.dist", kE5);
    Run v = run({"verify", "--input", e5});
    CHECK(v.code == 0);
    CHECK(v.out.find("FAIL") == std::string::npos);
    CHECK(v.out.find("closure-commutes: pass") != std::string::npos);

    std::string good = s.write("good.nwk", "(1,2,3,(4,5)P)C!;\n");
    std::string bad = s.write("bad.nwk", "((1,2)P,3,(4,5)P)P!;\n");
    CHECK(run({"verify", "--input", e5, "--tree", good}).code == 0);
    Run mismatch = run({"verify", "--input", e5, "--tree", bad});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.out.find("tree-matches: FAIL (best fit is ((4,5)P,1,2,3)C!;)") != std::string::npos);

    Run wrong = run({"verify", "--input", e5, "--ordering", "1,3,2,4,5"});
    CHECK(wrong.code == 1);
    CHECK(wrong.out.find("kalmanson: FAIL") != std::string::npos);

    Run dot = run({"export-dot", "--tree", good});
    CHECK(dot.code == 0);
    CHECK(dot.out.find("shape=box") != std::string::npos);
    CHECK(dot.out.find("dashed") == std::string::npos);
    Run weighted = run({"export-dot", "--tree", good, "--input", e5});
    CHECK(weighted.code == 0);
    CHECK(weighted.out.find("style=dashed") != std::string::npos);
}

TEST_CASE("exit codes") {
    Scratch s;
    std::string dq = s.write("dq.dist", kDQ);
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"check"}).code == 2);
    CHECK(run({"check", "--input", s.path("missing.dist")}).code == 2);
    CHECK(run({"gromov", "--input", dq}).code == 2);
    CHECK(run({"gromov", "--input", dq, "--base", "9"}).code == 2);
    CHECK(run({"decompose", "--input", dq, "--ordering", "1,2,3"}).code == 2);
    CHECK(run({"pctree", "--input", dq, "--format", "xml"}).code == 2);
    CHECK(run({"export-dot"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    std::string broken = s.write("broken.dist", "2\na 0 1\nb 2 0\n");
    Run parse = run({"check", "--input", broken});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("line 3") != std::string::npos);

    // More than ten taxa need a ring.
    std::ostringstream big;
    big << "11\n";
    for (int i = 0; i < 11; ++i) {
        big << "t" << i;
        for (int j = 0; j < 11; ++j) big << (i == j ? " 0" : " 1");
        big << "\n";
    }
    std::string b = s.write("big.dist", big.str());
    CHECK(run({"pctree", "--input", b}).code == 2);
    CHECK(run({"check", "--input", b}).code == 2);
    CHECK(run({"pctree", "--input", b, "--ordering", "t0,t1,t2,t3,t4,t5,t6,t7,t8,t9,t10"}).code == 0);

    CHECK(run({"pctree", "--input", dq, "--ordering", "1,3,2,4"}).code == 1);
}
