//! Drives the command line front end from code: evolve with recorded
//! noise, then re-solve heads from the files on disk.

use logdyn::cli::main_with_args;

fn main() {
    let dir = std::env::temp_dir().join("logdyn-cli-pipeline");
    let out = |s: &str| dir.join(s).display().to_string();
    let runs: [Vec<String>; 3] = [
        ["logdyn", "evolve", "--model", "dyson", "--confinement", "0.5", "--n", "12", "--t-final", "0.05"]
            .into_iter()
            .map(String::from)
            .chain(["--dt", "1e-3", "--replicas", "2", "--record-noise", "--out"].map(String::from))
            .chain([out("evolve")])
            .collect(),
        ["logdyn", "ifc-check", "--ms", "1,6,12", "--trajectory"]
            .into_iter()
            .map(String::from)
            .chain([out("evolve/manifest.json"), "--out".into(), out("ifc")])
            .collect(),
        ["logdyn", "stats", "stationarity", "--trajectory"]
            .into_iter()
            .map(String::from)
            .chain([out("evolve/manifest.json"), "--out".into(), out("stats")])
            .collect(),
    ];
    for args in runs {
        let code = main_with_args(&args);
        assert_eq!(code, 0, "{args:?}");
    }
    print!("{}", std::fs::read_to_string(dir.join("ifc/ifc.csv")).unwrap());
}
