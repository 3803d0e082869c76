use tfade::{Method, Norm};
use tfade_bench::commands::write_convergence;
use tfade_bench::{convergence, soe_check, CliError, MethodChoice, RunSpec};

fn time_spec() -> RunSpec {
    RunSpec {
        case_id: 2,
        method: MethodChoice::Both,
        steps: Some(vec![16, 32]),
        cells: Some(vec![40]),
        ..RunSpec::default()
    }
}

#[test]
fn parallel_sweep_is_reproducible() {
    let spec = time_spec();
    let sweep = spec.sweep().unwrap();
    let render = || {
        let rows = convergence(&spec).unwrap();
        let mut buf = Vec::new();
        write_convergence(&spec, &sweep, &rows, &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn rows_are_grouped_by_method() {
    let rows = convergence(&RunSpec {
        norm: Norm::H1,
        ..time_spec()
    })
    .unwrap();
    let methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    assert_eq!(methods, [Method::Fast, Method::Fast, Method::Direct, Method::Direct]);
    assert!(rows[0].order.is_none() && rows[1].order.is_some());
    assert!(rows.iter().all(|r| r.norm == Norm::H1));
    // fast and direct share everything but the history kernel
    assert!((rows[0].error - rows[2].error).abs() <= 1e-8 * rows[0].error);
}

#[test]
fn zero_case_has_no_error_table() {
    let spec = RunSpec {
        case_id: 0,
        ..time_spec()
    };
    assert!(matches!(convergence(&spec), Err(CliError::Usage(_))));
}

#[test]
fn certification_report() {
    let check = soe_check(0.5, 1e-10, 1e-4, 2.0).unwrap();
    assert!(check.report.max_rel_error <= 1e-10);
    assert!(check.soe.n_exp() > 0);
    let err = soe_check(0.5, 1e-16, 1e-4, 2.0).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}
