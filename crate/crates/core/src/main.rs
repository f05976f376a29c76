use clap::{Parser, Subcommand};
use planarflow::instance::{
    parse_flow, parse_instance, serialize_flow, serialize_instance, Instance, InstanceError,
};
use planarflow::multiflow::{
    abstract_flow_reference, max_multiflow, net_into, oracle_optimum, solve,
};
use planarflow::oracle;
use planarflow::planar_graph::FlowMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "planarflow", about = "Boundary multi-terminal max flow in planar graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and write a flow file.
    Solve {
        input: PathBuf,
        output: PathBuf,
        /// Use the simple double-loop reference instead of the recursive solver.
        #[arg(long)]
        reference: bool,
        /// Re-check the output against the brute-force oracles.
        #[arg(long)]
        check: bool,
    },
    /// Generate an instance on stdout.
    Gen {
        /// Grid dimensions, e.g. 4x6.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-cap", default_value_t = 100)]
        max_cap: i64,
        /// grid (default) or path-star.
        #[arg(long, default_value = "grid")]
        family: String,
    },
    /// Verify a flow file against an instance.
    Verify { instance: PathBuf, flowfile: PathBuf },
    /// Operation-count and wall-time scaling over a size sweep.
    Bench {
        /// Comma-separated vertex counts, e.g. 1000,2000,4000.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 4)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "grid")]
        family: String,
    },
    /// Emit the per-phase search trace for every augmentation.
    Trace { instance: PathBuf, output: PathBuf },
}

fn read_instance(path: &PathBuf) -> Result<Instance, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {}", path.display(), e);
            return Err(ExitCode::from(2));
        }
    };
    parse_instance(&text).map_err(|e| {
        eprintln!("{}", e);
        match e {
            InstanceError::Syntax(_) => ExitCode::from(2),
            InstanceError::Invalid(_) => ExitCode::from(3),
        }
    })
}

fn flow_nets(inst: &Instance, flow: &FlowMap) -> Vec<i64> {
    (0..inst.graph.edge_count()).map(|e| flow[2 * e]).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve {
            input,
            output,
            reference,
            check,
        } => {
            let inst = match read_instance(&input) {
                Ok(i) => i,
                Err(c) => return c,
            };
            let report = if reference {
                abstract_flow_reference(&inst.graph, &inst.caps, &inst.terminals, None)
            } else {
                max_multiflow(&inst.graph, &inst.caps, &inst.terminals)
            };
            let report = match report {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("solve failed: {}", e);
                    return ExitCode::from(3);
                }
            };
            let text = serialize_flow(&report.pairs, report.total, &flow_nets(&inst, &report.flow));
            if let Err(e) = std::fs::write(&output, text) {
                eprintln!("cannot write {}: {}", output.display(), e);
                return ExitCode::from(3);
            }
            if check {
                let terms: Vec<usize> = inst.terminals.iter().map(|&(_, v)| v).collect();
                let rep = oracle::check_flow_feasible(&inst.graph, &inst.caps, &report.flow, &terms);
                let best = oracle_optimum(&inst.graph, &inst.caps, &inst.terminals);
                if !rep.is_feasible() || best != report.total {
                    eprintln!(
                        "check failed: feasible={} oracle={} reported={}",
                        rep.is_feasible(),
                        best,
                        report.total
                    );
                    for v in rep.violations.iter().take(5) {
                        eprintln!("  {}", v);
                    }
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Gen {
            grid,
            pairs,
            seed,
            max_cap,
            family,
        } => {
            let dims: Vec<&str> = grid.split('x').collect();
            if dims.len() != 2 {
                eprintln!("--grid expects RxC");
                return ExitCode::from(3);
            }
            let (rows, cols): (usize, usize) = match (dims[0].parse(), dims[1].parse()) {
                (Ok(r), Ok(c)) => (r, c),
                _ => {
                    eprintln!("--grid expects RxC");
                    return ExitCode::from(3);
                }
            };
            let inst = match family.as_str() {
                "grid" => planarflow::gen::gen_grid(rows, cols, pairs, seed, max_cap),
                "path-star" => planarflow::gen::gen_path_star(cols, pairs, seed),
                other => Err(format!("unknown family {:?}", other)),
            };
            match inst {
                Ok(i) => {
                    print!("{}", serialize_instance(&i));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}", e);
                    ExitCode::from(3)
                }
            }
        }
        Cmd::Verify { instance, flowfile } => {
            let inst = match read_instance(&instance) {
                Ok(i) => i,
                Err(c) => return c,
            };
            let text = match std::fs::read_to_string(&flowfile) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {}", flowfile.display(), e);
                    return ExitCode::from(2);
                }
            };
            let ff = match parse_flow(&text) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{}", e);
                    return ExitCode::from(2);
                }
            };
            if ff.nets.len() != inst.graph.edge_count() {
                eprintln!("flow file edge count mismatch");
                return ExitCode::from(4);
            }
            let mut flow = FlowMap::zeros(inst.graph.dart_count());
            for (e, &net) in ff.nets.iter().enumerate() {
                flow[2 * e] = net;
                flow[2 * e + 1] = -net;
            }
            let terms: Vec<usize> = inst.terminals.iter().map(|&(_, v)| v).collect();
            let rep = oracle::check_flow_feasible(&inst.graph, &inst.caps, &flow, &terms);
            let sinks: Vec<usize> = inst
                .terminals
                .iter()
                .filter(|&&(s, _)| !s)
                .map(|&(_, v)| v)
                .collect();
            let nets_in = net_into(&inst.graph, &flow, &sinks);
            let best = oracle_optimum(&inst.graph, &inst.caps, &inst.terminals);
            let pair_sum: i64 = ff.pairs.iter().map(|&(_, _, v)| v).sum();
            println!("feasible: {}", rep.is_feasible());
            println!("net into sinks: {}", nets_in);
            println!("declared value: {}", ff.total);
            println!("pair sum: {}", pair_sum);
            println!("oracle optimum: {}", best);
            println!(
                "min-cut certificate: {}",
                if best == ff.total { "exists" } else { "MISSING" }
            );
            if !rep.is_feasible() || nets_in != ff.total || best != ff.total || pair_sum != ff.total
            {
                for v in rep.violations.iter().take(5) {
                    eprintln!("  {}", v);
                }
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Cmd::Bench {
            sizes,
            pairs,
            seed,
            csv,
            family,
        } => {
            let list: Vec<usize> = sizes
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().expect("bad size"))
                .collect();
            let mut out = String::from("n,faces,heap_ops,order_ops,ops_per_face,wall_time\n");
            for &n in &list {
                let inst = match family.as_str() {
                    "grid" => {
                        let side = (n as f64).sqrt().round().max(2.0) as usize;
                        planarflow::gen::gen_grid(side, side, pairs, seed, 100).unwrap()
                    }
                    "path-star" => planarflow::gen::gen_path_star(n / 2, pairs, seed).unwrap(),
                    other => {
                        eprintln!("unknown family {:?}", other);
                        return ExitCode::from(3);
                    }
                };
                let start = Instant::now();
                let solved = solve(&inst.graph, &inst.caps, &inst.terminals, false, None)
                    .expect("bench instance must solve");
                let micros = start.elapsed().as_micros();
                let faces = solved.finite_faces.max(1);
                let ops = solved.heap_ops + solved.order_ops;
                out.push_str(&format!(
                    "{},{},{},{},{:.3},{}\n",
                    inst.graph.vertex_count,
                    faces,
                    solved.heap_ops,
                    solved.order_ops,
                    ops as f64 / faces as f64,
                    micros
                ));
            }
            match csv {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, out) {
                        eprintln!("cannot write {}: {}", path.display(), e);
                        return ExitCode::from(3);
                    }
                }
                None => print!("{}", out),
            }
            ExitCode::SUCCESS
        }
        Cmd::Trace { instance, output } => {
            let inst = match read_instance(&instance) {
                Ok(i) => i,
                Err(c) => return c,
            };
            let solved = match solve(&inst.graph, &inst.caps, &inst.terminals, true, None) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("solve failed: {}", e);
                    return ExitCode::from(3);
                }
            };
            let mut text = String::new();
            for rec in &solved.augments {
                text.push_str(&format!(
                    "augment {} {} value {}\n",
                    rec.source, rec.sink, rec.value
                ));
                for line in &rec.trace {
                    text.push_str(&format!(
                        "phase {} {} {}\n",
                        line.q, line.faces_popped, line.darts_relaxed
                    ));
                }
            }
            if let Err(e) = std::fs::write(&output, text) {
                eprintln!("cannot write {}: {}", output.display(), e);
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
    }
}
