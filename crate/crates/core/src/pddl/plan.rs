use super::sexpr::parse_all;
use super::{agreement, at_most_one, check_signature, pred_name, state_preds, PddlError, Problem};
use crate::boolean::{atoms_for, entails, lift_action, pullback_valuation, BoolAction, BoolError, Binding, Proposition, TypedObj, UpdateRule, Valuation};
use crate::signature::{GeneratorDecl, ParamPort, Polarity, Signature, Sort};

/// PDDL action name of a generator: lowercase, `'` spelled `-prime`.
pub fn action_name(gen: &str) -> String {
    gen.to_lowercase().replace('\'', "-prime")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    /// Generator name.
    pub action: String,
    /// Problem objects bound to the generator parameters, in order.
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    /// One `(<action> <obj>...)` per line.
    pub fn to_text(&self) -> String {
        self.steps
            .iter()
            .map(|s| {
                let mut words = vec![action_name(&s.action)];
                words.extend(s.args.iter().cloned());
                format!("({})\n", words.join(" "))
            })
            .collect()
    }
}

fn find_gen<'a>(sig: &'a Signature, name: &str) -> Option<&'a GeneratorDecl> {
    let lower = name.to_lowercase();
    sig.generators.iter().find(|g| action_name(&g.name) == lower || g.name.to_lowercase() == lower)
}

/// Parse a plan, one s-expression per line, `;` comments. Action names match
/// the emitted PDDL names or the generator names, ignoring case.
pub fn parse_plan(text: &str, sig: &Signature, problem: &Problem) -> Result<Plan, PddlError> {
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        for e in parse_all(line, no).map_err(|e| PddlError::Syntax { line: e.line, msg: e.msg })? {
            let items = e.list().ok_or_else(|| PddlError::Syntax { line: no, msg: format!("expected (<action> <obj>...), found '{}'", e) })?;
            let words: Vec<&str> = items
                .iter()
                .map(|x| x.atom())
                .collect::<Option<_>>()
                .ok_or_else(|| PddlError::Syntax { line: no, msg: "nested list in plan step".into() })?;
            let (name, args) = words.split_first().ok_or_else(|| PddlError::Syntax { line: no, msg: "empty step".into() })?;
            let g = find_gen(sig, name).ok_or_else(|| PddlError::UnknownAction { line: no, name: name.to_string() })?;
            let params = g.params(sig);
            if params.len() != args.len() {
                return Err(PddlError::Arity { line: no, action: name.to_string(), expected: params.len(), found: args.len() });
            }
            for (p, a) in params.iter().zip(args) {
                let o = problem.object(a).ok_or_else(|| PddlError::UnknownObject { line: no, name: a.to_string() })?;
                if o.ty != p.ty {
                    return Err(PddlError::ArgType { line: no, action: name.to_string(), arg: a.to_string(), expected: p.ty.clone(), found: o.ty.clone() });
                }
            }
            steps.push(PlanStep { action: g.name.clone(), args: args.iter().map(|s| s.to_string()).collect() });
        }
    }
    Ok(Plan { steps })
}

/// Ground a plan step as a Boolean action over its bound objects plus every
/// data object of the problem, with the identity binding into the problem.
///
/// Preconditions are named by their predicate. Atoms of consumed entities
/// (domain entity ports that are not passed through) are frozen, and each
/// `exclusive` attribute allows one value per produced entity.
pub fn ground_action(sig: &Signature, problem: &Problem, step: &PlanStep) -> Result<(BoolAction, Binding), PddlError> {
    let g = sig.generator(&step.action).ok_or_else(|| PddlError::UnknownGenerator(step.action.clone()))?;
    let params = g.params(sig);
    let obj = |n: &str| problem.object(n).cloned().ok_or_else(|| PddlError::UnknownObject { line: 0, name: n.to_string() });
    let mut local: Vec<TypedObj> = Vec::new();
    for a in &step.args {
        let o = obj(a)?;
        if !local.contains(&o) {
            local.push(o);
        }
    }
    for d in problem.data_objects(sig) {
        if !local.contains(d) {
            local.push(d.clone());
        }
    }
    let atoms = atoms_for(&state_preds(sig), &local)?;
    let types: Vec<String> = params.iter().map(|p| p.ty.clone()).collect();
    let side = |attr: &str, pos: usize| sig.literal_attr(attr, &types[pos]).ok_or_else(|| PddlError::UnknownLiteral(g.name.clone()));
    let mut pre = Vec::new();
    for l in &g.pre {
        let (a1, a2) = (side(&l.attr_l, l.pos_l)?, side(&l.attr_r, l.pos_r)?);
        let p = agreement(&atoms, &local, &a1, &step.args[l.pos_l], &a2, &step.args[l.pos_r]);
        let (label, p) = match l.polarity {
            Polarity::Pos => (pred_name(&a1, &a2), p),
            Polarity::Neg => (format!("(not {})", pred_name(&a1, &a2)), p.not()),
        };
        pre.push((label, p));
    }
    let mut post = Proposition::top(&atoms);
    for l in &g.post {
        let (a1, a2) = (side(&l.attr_l, l.pos_l)?, side(&l.attr_r, l.pos_r)?);
        let p = agreement(&atoms, &local, &a1, &step.args[l.pos_l], &a2, &step.args[l.pos_r]);
        post = post.and(&if l.polarity == Polarity::Pos { p } else { p.not() })?;
    }
    let consumed: Vec<&str> = params
        .iter()
        .zip(&step.args)
        .filter(|(p, _)| matches!(p.port, ParamPort::Domain { through: None, .. }) && sig.sort_of(&p.ty) == Some(Sort::Entity))
        .map(|(_, a)| a.as_str())
        .collect();
    for a in &problem.exclusive {
        let info = sig.attr_info(a).ok_or_else(|| PddlError::UnknownLiteral(a.clone()))?;
        for (p, x) in params.iter().zip(&step.args) {
            if p.ty == info.carrier && !consumed.contains(&x.as_str()) {
                post = post.and(&at_most_one(&atoms, &local, &info, x))?;
            }
        }
    }
    let frozen = atoms.atoms().iter().map(|a| consumed.contains(&a.args[0].as_str())).collect();
    let j = Binding::identity(&local);
    Ok((BoolAction { name: super::action_name(&g.name), params: local, atoms, pre, post, frozen }, j))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub action: String,
    pub args: Vec<String>,
    /// The local result satisfies the post-condition.
    pub post_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolTrace {
    /// `steps + 1` states, starting from the problem's initial state.
    pub states: Vec<Valuation>,
    pub checks: Vec<StepCheck>,
    pub goal_reached: bool,
    pub warnings: Vec<String>,
}

pub fn validate_plan(plan: &Plan, problem: &Problem, sig: &Signature) -> Result<BoolTrace, PddlError> {
    validate_plan_with(plan, problem, sig, UpdateRule::default())
}

/// Fold [`lift_action`] over the plan from the initial state. Fails at the
/// first step whose local precondition does not hold.
pub fn validate_plan_with(plan: &Plan, problem: &Problem, sig: &Signature, rule: UpdateRule) -> Result<BoolTrace, PddlError> {
    check_signature(sig)?;
    let mut states = vec![problem.init.clone()];
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    for (k, step) in plan.steps.iter().enumerate() {
        let (a, j) = ground_action(sig, problem, step)?;
        let cur = states.last().unwrap();
        let next = lift_action(&a, &j, cur, rule).map_err(|e| match e {
            BoolError::Precondition { action, failed } => PddlError::InvalidStep { step: k + 1, action, predicate: failed },
            e => e.into(),
        })?;
        let local_before = pullback_valuation(&j, &a.atoms, cur)?;
        let local_after = pullback_valuation(&j, &a.atoms, &next)?;
        let post_holds = entails(&local_after, &a.effective_post(&local_before))?;
        if !post_holds {
            warnings.push(format!("step {} ({}): post-condition is not a literal conjunction and was not established", k + 1, a.name));
        }
        checks.push(StepCheck { action: step.action.clone(), args: step.args.clone(), post_holds });
        states.push(next);
    }
    let goal_reached = entails(states.last().unwrap(), &problem.goal)?;
    Ok(BoolTrace { states, checks, goal_reached, warnings })
}
