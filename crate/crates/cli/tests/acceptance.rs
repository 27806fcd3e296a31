//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//! Criteria 1-10 run through the library; 11 drives the `verify` command.

use std::process::{Command, ExitCode};

use altseq::verify::{Verifier, VerifyConfig, CRITERIA};

fn verify_command() -> Result<(bool, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_altseq"))
        .arg("verify")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code() == Some(0), out.stdout))
}

fn main() -> ExitCode {
    let verifier = Verifier::new(VerifyConfig::default());
    let mut all = true;
    for id in 1..=CRITERIA {
        let o = verifier.run(id);
        all &= o.passed;
        println!("{o}");
    }

    let (passed, detail) = match (verify_command(), verify_command()) {
        (Ok((ok1, a)), Ok((ok2, b))) => {
            let same = a == b;
            (ok1 && ok2 && same, format!("exit 0: {}, byte-identical reruns: {same}", ok1 && ok2))
        }
        (Err(e), _) | (_, Err(e)) => (false, format!("could not run verify: {e}")),
    };
    all &= passed;
    println!(
        "criterion 11 [{}] verify command is clean and reproducible: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
