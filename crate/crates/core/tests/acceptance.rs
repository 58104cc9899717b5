//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines;
//! every criterion is exact (zero tolerance) because all arithmetic is.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use k1inv::corpus::{cohomology_groups, cohomology_lattices, mult_type_corpus};
use k1inv::galois::{
    coset_permutations, h0, h0_induced, h0_presentation, h1, h1_oracle, mod_n,
    permutation_lattice, presented_kernel, GammaModule,
};
use k1inv::invariants::{inv1_mod_n, inv1_qz, pic_torus, verify_exactness};
use k1inv::lattice::{n_torsion, snf, torsion_part, FinAbGroup, IntMatrix};
use k1inv::multtype::{
    character_sequence_mod_n, resolve_by_tori, resolve_with_generators, smith_generators,
    MultTypeGroup, ToriResolution,
};

fn report(number: usize, name: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number} ({name}): {status}");
    for f in failures.iter().take(10) {
        println!("  - {f}");
    }
    assert!(failures.is_empty(), "criterion {number} ({name}) failed");
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(-50i64..=50)))
        .collect();
    IntMatrix::new(rows, cols, entries).unwrap()
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..2 * n + 2 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => {
                // row j += c * row i
                if i == j {
                    j = (j + 1) % n;
                }
                if i != j {
                    let c = BigInt::from(rng.gen_range(-3i64..=3));
                    for k in 0..n {
                        let v = m.get(j, k) + &c * m.get(i, k);
                        m.set(j, k, v);
                    }
                }
            }
            1 => {
                // swap rows
                if i != j {
                    for k in 0..n {
                        let a = m.get(i, k).clone();
                        let b = m.get(j, k).clone();
                        m.set(i, k, b);
                        m.set(j, k, a);
                    }
                }
            }
            _ => {
                // negate a row
                for k in 0..n {
                    let v = -m.get(i, k).clone();
                    m.set(i, k, v);
                }
            }
        }
    }
    assert!(m.determinant().abs().is_one(), "constructed matrix not unimodular");
    m
}

#[test]
fn criterion_1_smith_normal_form_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut failures = Vec::new();
    for case in 0..500 {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let m = random_matrix(&mut rng, rows, cols);
        let dec = snf(&m);
        if dec.u.mul(&m).mul(&dec.v) != dec.d {
            failures.push(format!("case {case}: U*A*V != D"));
            continue;
        }
        if !dec.u.determinant().abs().is_one() || !dec.v.determinant().abs().is_one() {
            failures.push(format!("case {case}: transform not unimodular"));
            continue;
        }
        let diag = dec.diag();
        let mut chain_ok = true;
        for w in diag.windows(2) {
            if !w[0].is_zero() && !w[1].is_zero() && !(&w[1] % &w[0]).is_zero() {
                chain_ok = false;
            }
            if w[0].is_zero() && !w[1].is_zero() {
                chain_ok = false;
            }
        }
        if diag.iter().any(|d| d.is_negative()) {
            chain_ok = false;
        }
        if !chain_ok {
            failures.push(format!("case {case}: divisibility chain broken: {diag:?}"));
            continue;
        }
        // invariance under unimodular change of basis on either side
        let p = random_unimodular(&mut rng, rows);
        let q = random_unimodular(&mut rng, cols);
        let transformed = p.mul(&m).mul(&q);
        if snf(&transformed).d != dec.d {
            failures.push(format!("case {case}: D not invariant under P*A*Q"));
        }
    }
    report(1, "smith normal form suite, 500 random matrices", &failures);
}

#[test]
fn criterion_2_cohomology_oracle_equivalence() {
    let mut failures = Vec::new();
    for (group_name, group) in cohomology_groups() {
        let order = BigInt::from(group.order());
        for (lattice_name, lattice) in cohomology_lattices(&group) {
            let module = GammaModule::from_lattice(lattice);
            let fast = h1(&module);
            match h1_oracle(&module) {
                Ok(oracle) => {
                    if oracle != fast {
                        failures.push(format!(
                            "{group_name}/{lattice_name}: h1 = {fast} but oracle = {oracle}"
                        ));
                    }
                }
                Err(e) => failures.push(format!(
                    "{group_name}/{lattice_name}: oracle refused in-bound input: {e}"
                )),
            }
            for d in fast.torsion() {
                if !(&order % d).is_zero() {
                    failures.push(format!(
                        "{group_name}/{lattice_name}: invariant factor {d} does not divide {order}"
                    ));
                }
            }
        }
        // Shapiro vanishing on the regular representation
        let regular_perms = coset_permutations(&group, &[group.identity()]).unwrap();
        let regular = permutation_lattice(&group, &regular_perms).unwrap();
        let module = GammaModule::from_lattice(regular);
        let fast = h1(&module);
        if !fast.is_trivial() {
            failures.push(format!("{group_name}: h1 of regular block is {fast}"));
        }
        match h1_oracle(&module) {
            Ok(oracle) if !oracle.is_trivial() => {
                failures.push(format!("{group_name}: oracle h1 of regular block is {oracle}"))
            }
            Ok(_) => {}
            Err(e) => failures.push(format!("{group_name}: oracle refused regular block: {e}")),
        }
    }
    report(2, "cohomology oracle equivalence and Shapiro vanishing", &failures);
}

#[test]
fn criterion_3_classical_regression_anchors() {
    let corpus = mult_type_corpus();
    let by_name = |name: &str| -> &MultTypeGroup {
        corpus
            .iter()
            .find(|g| g.display_name() == name)
            .unwrap_or_else(|| panic!("corpus entry {name} missing"))
    };
    let mut failures = Vec::new();

    let quadratic = pic_torus(by_name("norm_one_quadratic")).unwrap().group;
    if quadratic != FinAbGroup::cyclic(2) {
        failures.push(format!("quadratic norm-one torus: {quadratic} != Z/2"));
    }
    let cubic = pic_torus(by_name("norm_one_cubic")).unwrap().group;
    if cubic != FinAbGroup::cyclic(3) {
        failures.push(format!("cubic norm-one torus: {cubic} != Z/3"));
    }
    for name in ["gm", "split_torus_3", "weil_restriction_quadratic", "weil_restriction_s3"] {
        let entry = by_name(name);
        if !entry.chars.ambient().is_permutation() {
            failures.push(format!("{name} is not quasisplit"));
            continue;
        }
        let pic = pic_torus(entry).unwrap().group;
        if !pic.is_trivial() {
            failures.push(format!("quasisplit {name}: Picard group {pic} != 0"));
        }
    }
    report(3, "classical regression anchors", &failures);
}

#[test]
fn criterion_4_torsion_cross_check_and_exactness() {
    let mut failures = Vec::new();
    for entry in mult_type_corpus() {
        for n in [1u64, 2, 3, 4, 6, 12] {
            let modulus = BigInt::from(n);
            match inv1_mod_n(&entry, &modulus) {
                Ok(report) => {
                    let direct = n_torsion(&h0(&entry.chars), &modulus);
                    if report.group != direct {
                        failures.push(format!(
                            "{} n={n}: report {} != direct {direct}",
                            entry.display_name(),
                            report.group
                        ));
                    }
                }
                Err(e) => failures.push(format!(
                    "{} n={n}: cross-check failed: {e}",
                    entry.display_name()
                )),
            }
            match verify_exactness(&entry, &modulus) {
                Ok(record) => {
                    if !(record.injective && record.exact_at_kernel) {
                        failures.push(format!(
                            "{} n={n}: exactness record not exact",
                            entry.display_name()
                        ));
                    }
                }
                Err(e) => failures.push(format!(
                    "{} n={n}: exactness verification failed: {e}",
                    entry.display_name()
                )),
            }
        }
    }
    report(4, "torsion cross-check and fixed-point exactness", &failures);
}

#[test]
fn criterion_5_colimit_stabilization() {
    let mut failures = Vec::new();
    for entry in mult_type_corpus() {
        let limit = match inv1_qz(&entry) {
            Ok(r) => r.group,
            Err(e) => {
                failures.push(format!("{}: inv1_qz failed: {e}", entry.display_name()));
                continue;
            }
        };
        let exponent = torsion_part(&h0(&entry.chars)).exponent();
        for m in 1u64..=24 {
            if !(BigInt::from(m) % &exponent).is_zero() {
                continue;
            }
            match inv1_mod_n(&entry, &BigInt::from(m)) {
                Ok(r) => {
                    if r.group != limit {
                        failures.push(format!(
                            "{} m={m}: {} != stable value {limit}",
                            entry.display_name(),
                            r.group
                        ));
                    }
                }
                Err(e) => failures.push(format!("{} m={m}: {e}", entry.display_name())),
            }
        }
    }
    report(5, "colimit stabilization up to m = 24", &failures);
}

#[test]
fn criterion_6_qz_ladder() {
    let mut failures = Vec::new();
    for entry in mult_type_corpus().into_iter().filter(MultTypeGroup::is_torus) {
        let fixed = h0(&entry.chars);
        let rank = fixed.free_rank() as u32;
        let finite = h1(&entry.chars);
        for n in [1u64, 2, 6, 12, 60] {
            let modulus = BigInt::from(n);
            let observed = h0(&mod_n(&entry.chars, &modulus))
                .order()
                .expect("finite fixed points");
            let expected =
                modulus.pow(rank) * n_torsion(&finite, &modulus).order().expect("finite");
            if observed != expected {
                failures.push(format!(
                    "{} n={n}: |H0(chars/n)| = {observed} != {expected}",
                    entry.display_name()
                ));
            }
        }
    }
    report(6, "divisible-part ladder for Q/Z values", &failures);
}

/// A second, deliberately different generator choice: reversed order with a
/// redundant combination adjoined.
fn perturbed_generators(generators: &IntMatrix) -> IntMatrix {
    let cols = generators.cols();
    if cols == 0 {
        return generators.clone();
    }
    if cols == 1 {
        return generators.hconcat(generators);
    }
    let mut out = IntMatrix::zeros(generators.rows(), cols + 1);
    for j in 0..cols {
        for i in 0..generators.rows() {
            out.set(i, j, generators.get(i, cols - 1 - j).clone());
        }
    }
    for i in 0..generators.rows() {
        let sum = generators.get(i, 0) + generators.get(i, 1);
        out.set(i, cols, sum);
    }
    out
}

fn resolution_kernel_group(res: &ToriResolution, n: &BigInt) -> FinAbGroup {
    let seq = character_sequence_mod_n(res, n).expect("sequence construction");
    let source = h0_presentation(seq.reduced_inclusion.source());
    let target = h0_presentation(seq.reduced_inclusion.target());
    let induced = h0_induced(&seq.reduced_inclusion, &source, &target);
    presented_kernel(&induced, &source.relations, &target.relations).0
}

#[test]
fn criterion_7_resolution_well_formedness_and_independence() {
    let mut failures = Vec::new();
    for entry in mult_type_corpus() {
        let default_res = resolve_by_tori(&entry);
        if let Err(e) = default_res.verify() {
            failures.push(format!("{}: default resolution: {e}", entry.display_name()));
            continue;
        }
        let perturbed = perturbed_generators(&smith_generators(&entry.chars));
        let second_res = match resolve_with_generators(&entry, &perturbed) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!(
                    "{}: perturbed resolution failed: {e}",
                    entry.display_name()
                ));
                continue;
            }
        };
        if let Err(e) = second_res.verify() {
            failures.push(format!("{}: perturbed resolution: {e}", entry.display_name()));
            continue;
        }
        if second_res.permutation.rank() == default_res.permutation.rank()
            && entry.chars.rank() > 0
            && smith_generators(&entry.chars).cols() > 0
        {
            // the perturbation always adds a block
            failures.push(format!(
                "{}: perturbation did not change the covering module",
                entry.display_name()
            ));
        }
        for n in [2u64, 6] {
            let modulus = BigInt::from(n);
            let a = resolution_kernel_group(&default_res, &modulus);
            let b = resolution_kernel_group(&second_res, &modulus);
            if a != b {
                failures.push(format!(
                    "{} n={n}: kernel differs across resolutions: {a} vs {b}",
                    entry.display_name()
                ));
            }
            let direct = n_torsion(&h0(&entry.chars), &modulus);
            if a != direct {
                failures.push(format!(
                    "{} n={n}: resolution kernel {a} != direct {direct}",
                    entry.display_name()
                ));
            }
        }
    }
    report(7, "resolution well-formedness and generator independence", &failures);
}

#[test]
fn criterion_8_cli_determinism_and_golden_files() {
    let mut failures = Vec::new();
    let binary = env!("CARGO_BIN_EXE_k1inv");
    let run = |args: &[&str]| -> (String, bool) {
        let out = std::process::Command::new(binary)
            .args(args)
            .output()
            .expect("binary runs");
        (
            String::from_utf8(out.stdout).expect("utf-8 output"),
            out.status.success(),
        )
    };
    let (first, ok1) = run(&["corpus"]);
    let (second, ok2) = run(&["corpus"]);
    if !(ok1 && ok2) {
        failures.push("corpus run exited nonzero".into());
    }
    if first != second {
        failures.push("two corpus runs differ".into());
    }
    let golden_text = include_str!("golden/corpus.txt");
    if first != golden_text {
        failures.push("corpus text output differs from golden file".into());
    }
    let (json_run, ok3) = run(&["corpus", "--format", "json"]);
    if !ok3 {
        failures.push("corpus json run exited nonzero".into());
    }
    let golden_json = include_str!("golden/corpus.json");
    if json_run != golden_json {
        failures.push("corpus json output differs from golden file".into());
    }
    report(8, "CLI determinism against committed golden files", &failures);
}
