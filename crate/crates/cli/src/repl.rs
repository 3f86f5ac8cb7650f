//! Line-oriented session. Declarations, `:let` bindings and the heap persist
//! across lines; each line prints one result (or one JSON report).

use std::io::{BufRead, Write};
use std::rc::Rc;

use rs1::eval::{render_value, Env, EvalConfig, Evaluator, Heap, Value};
use rs1::metrics::{apparent_size, is_rank0_codata, observed_size};
use rs1::surface::{is_keyword, parse_decls_in, parse_expr_in, Scope, Term};
use rs1::typesys::{check_declarations, Checker, DeclEnv, Mode, Ty, TyCtx};
use rs1::Error;

use crate::report::{CostReport, Report};
use crate::{not_ground, Failure};

const HELP: &str = "\
  e                 evaluate e and print `value : type`
  data ... / codata ...   add declarations
  :let x = e        evaluate e and bind it to x
  :type e           print the type of e
  :size e           print the apparent size of e's value
  :osize n e        print the observed size of e's value at depth n
  :help             this text
  :quit             leave
";

/// Site ids handed to each parsed line start here and grow by this stride,
/// so fold statistics from different lines never collide.
const SITE_STRIDE: u32 = 1 << 16;

struct Session {
    mode: Mode,
    config: EvalConfig,
    scope: Scope,
    decls: DeclEnv,
    ctx: TyCtx,
    env: Env,
    heap: Heap,
    next_site: u32,
}

pub fn run(mode: Mode, config: EvalConfig, json: bool, input: &mut dyn BufRead, out: &mut dyn Write) -> u8 {
    let mut s = Session {
        mode,
        config,
        scope: Scope::default(),
        decls: DeclEnv::default(),
        ctx: TyCtx::new(),
        env: Env::new(),
        heap: Heap::new(),
        next_site: 0,
    };
    for line in input.lines() {
        let Ok(line) = line else { return 2 };
        let line = line.trim();
        if line.is_empty() || line.starts_with("--") {
            continue;
        }
        if line == ":quit" || line == ":q" {
            break;
        }
        let mut report = Report::new("repl", &mode.to_string());
        let text = match s.line(line, &mut report) {
            Ok(text) => text,
            Err(f) => {
                report.ok = false;
                let text = format!("error[{}]: {}", f.error.code, f.error.message);
                report.error = Some(f.error);
                text
            }
        };
        let written = if json {
            serde_json::to_string(&report).map_err(std::io::Error::other).and_then(|j| writeln!(out, "{j}"))
        } else {
            writeln!(out, "{text}")
        };
        if written.is_err() {
            return 1;
        }
    }
    0
}

impl Session {
    fn line(&mut self, line: &str, report: &mut Report) -> Result<String, Failure> {
        if line.starts_with("data ") || line.starts_with("codata ") {
            return self.declare(line);
        }
        let Some(rest) = line.strip_prefix(':') else {
            let (v, ty) = self.eval(line, report)?;
            let value = render_value(&self.heap, &self.decls, &v, &ty, crate::RENDER_LIMIT);
            report.value = Some(value.clone());
            return Ok(format!("{value} : {ty}"));
        };
        let (cmd, arg) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let arg = arg.trim();
        match cmd {
            "help" => Ok(HELP.trim_end().to_string()),
            "type" | "t" => {
                let (_, ty) = self.typed(arg)?;
                report.ty = Some(ty.to_string());
                Ok(ty.to_string())
            }
            "let" => {
                let (x, e) = arg
                    .split_once('=')
                    .map(|(x, e)| (x.trim(), e.trim()))
                    .filter(|(x, _)| is_identifier(x))
                    .ok_or_else(|| Failure::usage("bad-command", "usage: :let x = e"))?;
                let (v, ty) = self.eval(e, report)?;
                self.ctx.push(x.into(), ty.clone());
                self.env = self.env.extend(x.into(), v);
                Ok(format!("{x} : {ty}"))
            }
            "size" => {
                let (v, ty) = self.eval(arg, report)?;
                if !ty.is_ground() {
                    return Err(not_ground(&ty));
                }
                let size = apparent_size(&[v], &self.heap);
                report.size = Some(size);
                Ok(size.to_string())
            }
            "osize" => {
                let (n, e) = arg.split_once(char::is_whitespace).unwrap_or((arg, ""));
                let depth: u64 = n.parse().map_err(|_| Failure::usage("bad-command", "usage: :osize n e"))?;
                let (v, ty) = self.eval(e.trim(), report)?;
                if !is_rank0_codata(&ty, &self.decls) {
                    return Err(Failure::new(
                        1,
                        "type",
                        "not-rank0-codata",
                        format!("observed size needs a rank-0 codata value, found `{ty}`"),
                    ));
                }
                let size = observed_size(&self.decls, &mut self.heap, &v, depth, self.config, false)
                    .map_err(|e| Failure::eval(&e))?;
                report.size = Some(size);
                report.depth = Some(depth);
                Ok(size.to_string())
            }
            other => Err(Failure::usage("bad-command", format!("unknown command `:{other}` (try :help)"))),
        }
    }

    fn declare(&mut self, line: &str) -> Result<String, Failure> {
        let new = parse_decls_in(line, &self.scope).map_err(|e| Failure::from(Error::Parse(e)))?;
        let mut decls = self.decls.clone();
        for d in &new {
            decls.add(d).map_err(|e| Failure::from(Error::Elab(e)))?;
        }
        check_declarations(&decls, self.mode).map_err(|e| Failure::from(Error::Type(e)))?;
        self.decls = decls;
        for d in &new {
            self.scope.add(d);
        }
        let names: Vec<&str> = new.iter().map(|d| &*d.name).collect();
        Ok(format!("declared {}", names.join(", ")))
    }

    fn typed(&mut self, src: &str) -> Result<(Rc<Term>, Ty), Failure> {
        let (term, spans) =
            parse_expr_in(src, &self.scope, self.next_site).map_err(|e| Failure::from(Error::Parse(e)))?;
        self.next_site = self.next_site.wrapping_add(SITE_STRIDE);
        let ty = Checker::new(&self.decls, self.mode)
            .with_spans(&spans)
            .with_ctx(self.ctx.clone())
            .infer(&term)
            .map_err(|e| Failure::from(Error::Type(e)))?;
        Ok((term, ty))
    }

    fn eval(&mut self, src: &str, report: &mut Report) -> Result<(Value, Ty), Failure> {
        let (term, ty) = self.typed(src)?;
        let mut ev = Evaluator::new(&self.decls, &mut self.heap, self.config);
        let v = ev.eval(&term, &self.env).map_err(|e| Failure::eval(&e))?;
        report.ty = Some(ty.to_string());
        report.cost = Some(CostReport::from(ev.cost()));
        Ok((v, ty))
    }
}

fn is_identifier(x: &str) -> bool {
    let mut chars = x.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !is_keyword(x)
}
