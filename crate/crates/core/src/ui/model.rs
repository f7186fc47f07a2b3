use std::fmt;
use std::str::FromStr;

use crate::model::{ArgPattern, Expr, ValueLit};

/// A non-negative quantity in thousandths: prominence, tolerances, and ratios.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Milli(pub u32);

impl Milli {
    pub const ONE: Milli = Milli(1000);

    pub fn from_whole(n: u32) -> Milli {
        Milli(n * 1000)
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 1000.0
    }

    /// `self * other`, both in thousandths.
    pub fn times(self, n: u32) -> u64 {
        u64::from(self.0) * u64::from(n)
    }
}

impl fmt::Display for Milli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 1000;
        let frac = self.0 % 1000;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl FromStr for Milli {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(format!("not a decimal number: {s}"));
        }
        if frac.len() > 3 {
            return Err(format!("{s} has more than three decimal places"));
        }
        let whole: u32 = whole.parse().map_err(|_| format!("{s} is out of range"))?;
        let frac: u32 = if frac.is_empty() { 0 } else { format!("{frac:0<3}").parse().unwrap_or(0) };
        whole
            .checked_mul(1000)
            .and_then(|w| w.checked_add(frac))
            .map(Milli)
            .ok_or_else(|| format!("{s} is out of range"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Button,
    Label,
    Icon,
    Field,
    Checkbox,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] =
        [ElementKind::Button, ElementKind::Label, ElementKind::Icon, ElementKind::Field, ElementKind::Checkbox];

    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::Button => "Button",
            ElementKind::Label => "Label",
            ElementKind::Icon => "Icon",
            ElementKind::Field => "Field",
            ElementKind::Checkbox => "Checkbox",
        }
    }

    pub fn from_keyword(s: &str) -> Option<ElementKind> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

/// `inst.action(args)`; `_` leaves the argument to the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallTemplate {
    pub instance: String,
    pub action: String,
    pub args: Vec<ArgPattern>,
}

/// `inst.component` or `inst.component[key]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UiRef {
    pub instance: String,
    pub component: String,
    pub key: Option<ValueLit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UiBinding {
    Triggers { call: CallTemplate, default_on: bool, enabled_when: Option<Expr> },
    Displays(UiRef),
    /// The element says it shows `claimed` but actually renders `shown`.
    Claims { claimed: UiRef, shown: Expr },
    Static,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UiElement {
    pub id: String,
    pub screen: String,
    pub kind: ElementKind,
    pub label: String,
    pub style: Option<String>,
    pub prominence: Milli,
    pub steps: u32,
    pub visible: bool,
    pub binding: UiBinding,
    pub convention: Option<String>,
    pub paired: Option<String>,
}

impl UiElement {
    pub fn call(&self) -> Option<&CallTemplate> {
        match &self.binding {
            UiBinding::Triggers { call, .. } => Some(call),
            _ => None,
        }
    }

    pub fn default_on(&self) -> bool {
        matches!(self.binding, UiBinding::Triggers { default_on: true, .. })
    }

    /// The state reference this element presents, honestly or not.
    pub fn shown_ref(&self) -> Option<&UiRef> {
        match &self.binding {
            UiBinding::Displays(r) | UiBinding::Claims { claimed: r, .. } => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Screen {
    pub name: String,
    pub elements: Vec<UiElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UiModel {
    pub name: Option<String>,
    pub screens: Vec<Screen>,
}

impl UiModel {
    pub fn elements(&self) -> impl Iterator<Item = &UiElement> {
        self.screens.iter().flat_map(|s| s.elements.iter())
    }

    pub fn element(&self, id: &str) -> Option<&UiElement> {
        self.elements().find(|e| e.id == id)
    }

    pub fn visible(&self) -> impl Iterator<Item = &UiElement> {
        self.elements().filter(|e| e.visible)
    }

    pub fn elements_mut(&mut self) -> impl Iterator<Item = &mut UiElement> {
        self.screens.iter_mut().flat_map(|s| s.elements.iter_mut())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlScope {
    Global,
    PerItem,
}

/// Concept-specific rules a catalog entry places on any UI for its concept.
/// Names refer to members of the entry's concept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MappingStandard {
    RequireDisplay { state: String },
    RequireControl { action: String, scope: ControlScope },
    /// Only elements presenting `state` may carry `label`.
    LabelReservation { label: String, state: String },
    /// Controls for `action` must only be enabled when `guard` holds.
    GuardedControl { action: String, guard: Expr },
    EqualProminence { first: String, second: String },
    /// Reaching `second` must not take more than `max_ratio` times the steps of `first`.
    ReachParity { first: String, second: String, max_ratio: Option<Milli> },
    ConsistencyGroup { subject: String },
}
