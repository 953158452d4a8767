//! Exit-code contract and round-trip behavior of the binary: 0 on success,
//! 1 on usage errors, 2 on data errors.

use std::process::Command;

fn gridbox() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridbox"))
}

#[test]
fn unknown_flag_exits_one_with_help() {
    let out = gridbox().args(["detect16", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_config_file_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gridbox()
        .args(["detect16", "--config", "missing.toml"])
        .arg("--input")
        .arg(tmp.path())
        .arg("--output")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_scenario_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gridbox()
        .args(["simulate", "--scenario", "warp"])
        .arg("--output")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_frame_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    std::fs::create_dir_all(&frames).unwrap();
    std::fs::write(frames.join("frame_000000.csv"), "x,y,z,ring\nnope,0,0,0\n").unwrap();
    let out = gridbox()
        .args(["detect16"])
        .arg("--input")
        .arg(&frames)
        .arg("--output")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("frame_000000.csv:2"), "stderr: {stderr}");
}

#[test]
fn eval_with_empty_detections_counts_all_misses() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("short.config");
    std::fs::write(&config, "[simulate]\nduration = 2.0\n").unwrap();
    let frames = tmp.path().join("frames");
    let status = gridbox()
        .args(["simulate", "--scenario", "approach", "--seed", "1"])
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&frames)
        .status()
        .unwrap();
    assert!(status.success());

    // Detections file with the header only: no frames, hence no matches.
    let detections = tmp.path().join("detections.csv");
    std::fs::write(&detections, "# detections: empty\n").unwrap();
    let out = gridbox()
        .args(["eval"])
        .arg("--input")
        .arg(&frames)
        .arg("--detections")
        .arg(&detections)
        .arg("--output")
        .arg(tmp.path().join("eval"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("misses                           20"), "stdout: {stdout}");
}

#[test]
fn simulate_detect_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("short.config");
    std::fs::write(&config, "[simulate]\nduration = 3.0\n").unwrap();
    let frames = tmp.path().join("frames");
    assert!(gridbox()
        .args(["simulate", "--scenario", "multi_obstacle", "--seed", "2"])
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&frames)
        .status()
        .unwrap()
        .success());
    assert!(gridbox()
        .args(["detect8", "--decimate"])
        .arg("--input")
        .arg(&frames)
        .arg("--output")
        .arg(tmp.path().join("det"))
        .status()
        .unwrap()
        .success());
    let out = gridbox()
        .args(["eval"])
        .arg("--input")
        .arg(&frames)
        .arg("--detections")
        .arg(tmp.path().join("det/detections.csv"))
        .arg("--output")
        .arg(tmp.path().join("eval"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("eval/errors.csv").exists());
    assert!(tmp.path().join("eval/errors.dat").exists());
}
