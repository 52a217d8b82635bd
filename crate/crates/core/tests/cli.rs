use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ldpc-product"))
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(
        bin()
            .args(["simulate", "--help"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(0)
    );
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    assert_eq!(
        bin().args(["frobnicate"]).output().unwrap().status.code(),
        Some(2)
    );
    assert_eq!(
        bin()
            .args(["simulate", "--snr", "3:0:1"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin()
            .args(["simulate", "--snr", "1", "--trials", "0"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn operation_failure_exits_one() {
    let out = bin()
        .args(["decode", "--llr", "/nonexistent/llr.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn analyze_hamming3_prints_the_seven_four_table() {
    let out = bin()
        .args(["analyze", "--code", "hamming:3", "--e", "2..6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let expected = "\
code,n,k,e,total,with_w12,without_w12
\"Hamming(7,4)\",7,4,2,21,21,0
\"Hamming(7,4)\",7,4,3,35,35,0
\"Hamming(7,4)\",7,4,4,35,35,0
\"Hamming(7,4)\",7,4,5,21,21,0
\"Hamming(7,4)\",7,4,6,7,0,7
";
    assert_eq!(text, expected);
}

#[test]
fn threads_flag_is_accepted() {
    let out = bin()
        .args(["--threads", "2", "decodability", "--code", "dpc:6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("eta = 4"));
}
