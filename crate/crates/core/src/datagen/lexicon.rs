use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gazetteer::osa_bounded;
use crate::text::normalize_phrase;

pub const CITIES: &[&str] = &[
    "Mumbai", "New Delhi", "Delhi", "Bangalore", "Bengaluru", "Hyderabad", "Chennai", "Kolkata", "Pune",
    "Ahmedabad", "Jaipur", "Lucknow", "Kanpur", "Nagpur", "Indore", "Bhopal", "Patna", "Vadodara", "Ghaziabad",
    "Ludhiana", "Agra", "Nashik", "Faridabad", "Meerut", "Rajkot", "Varanasi", "Srinagar", "Aurangabad",
    "Dhanbad", "Amritsar", "Allahabad", "Ranchi", "Howrah", "Coimbatore", "Jabalpur", "Gwalior", "Vijayawada",
    "Jodhpur", "Madurai", "Raipur", "Kota", "Guwahati", "Chandigarh", "Solapur", "Bareilly", "Moradabad",
    "Mysore", "Gurgaon", "Aligarh", "Jalandhar", "Tiruchirappalli", "Bhubaneswar", "Salem", "Warangal",
    "Thiruvananthapuram", "Bhiwandi", "Saharanpur", "Gorakhpur", "Guntur", "Bikaner", "Amravati", "Noida",
    "Jamshedpur", "Bhilai", "Cuttack", "Firozabad", "Kochi", "Bhavnagar", "Dehradun", "Durgapur", "Asansol",
    "Nanded", "Kolhapur", "Ajmer", "Gulbarga", "Jamnagar", "Ujjain", "Loni", "Siliguri", "Jhansi", "Ulhasnagar",
    "Nellore", "Jammu", "Belgaum", "Mangalore", "Ambattur", "Tirunelveli", "Malegaon", "Gaya", "Udaipur",
    "Kakinada", "Davanagere", "Kozhikode", "Akola", "Kurnool", "Bokaro", "Rajahmundry", "Ballari", "Agartala",
    "Bhagalpur", "Latur", "Dhule", "Korba", "Bhilwara", "Brahmapur", "Muzaffarpur", "Ahmednagar", "Mathura",
    "Kollam", "Bilaspur", "Shahjahanpur", "Thrissur", "Alwar", "Kadapa", "Rohtak", "Shimla", "Panaji",
    "Imphal", "Shillong", "Aizawl", "Gangtok", "Itanagar", "Kohima", "Puducherry", "Haridwar", "Rishikesh",
    "Manipal", "Vellore", "Pilani", "Roorkee", "Kharagpur", "Navi Mumbai", "Thane", "Secunderabad",
];

pub const STATES: &[&str] = &[
    "Maharashtra", "Karnataka", "Tamil Nadu", "Kerala", "Gujarat", "Rajasthan", "Uttar Pradesh",
    "Madhya Pradesh", "Bihar", "West Bengal", "Odisha", "Telangana", "Andhra Pradesh", "Punjab", "Haryana",
    "Himachal Pradesh", "Uttarakhand", "Jharkhand", "Chhattisgarh", "Assam", "Goa", "Tripura", "Manipur",
    "Meghalaya", "Mizoram", "Nagaland", "Sikkim", "Arunachal Pradesh", "Jammu and Kashmir",
];

pub const COUNTRIES: &[&str] = &[
    "USA", "United States", "UK", "United Kingdom", "Canada", "Australia", "Germany", "France", "Ireland",
    "New Zealand", "Singapore", "Japan", "South Korea", "Netherlands", "Sweden", "Norway", "Denmark", "Finland",
    "Switzerland", "Italy", "Spain", "Poland", "Russia", "China", "Malaysia", "Dubai", "United Arab Emirates",
    "Austria", "Belgium", "Czech Republic", "Hungary", "Portugal", "Mauritius", "Philippines", "Ukraine",
    "Georgia", "Kazakhstan", "Bangladesh", "Nepal", "Sri Lanka", "Taiwan", "Hong Kong", "Israel", "Turkey",
    "Mexico", "Brazil", "Argentina", "Chile", "South Africa", "Egypt", "Cyprus", "Lithuania", "Latvia",
    "Estonia", "Iceland", "Luxembourg", "Greece", "Romania", "Bulgaria", "Croatia",
];

pub const DEGREES: &[&str] = &[
    "B. Tech", "BTech", "B.E.", "M. Tech", "MTech", "M.E.", "BBA", "MBA", "PGDM", "BCA", "MCA", "B.Sc", "M.Sc",
    "B.Com", "M.Com", "BA", "MA", "LLB", "LLM", "BA LLB", "MBBS", "BDS", "MD", "MS", "B.Pharm", "M.Pharm",
    "D.Pharm", "B.Arch", "M.Arch", "B.Ed", "M.Ed", "BFA", "MFA", "PhD", "Diploma", "Polytechnic Diploma",
    "BHM", "BAMS", "BHMS", "B.Des", "M.Des", "BJMC", "MJMC", "BPT", "MPT", "B.Voc", "Integrated MSc",
    "Dual Degree", "Executive MBA", "PG Diploma", "12th", "10th", "Class 12", "Class 10", "Intermediate",
];

pub const COURSES: &[&str] = &[
    "Computer Science", "Computer Science and Engineering", "Information Technology", "Mechanical Engineering",
    "Civil Engineering", "Electrical Engineering", "Electronics and Communication", "Chemical Engineering",
    "Aerospace Engineering", "Biotechnology", "Biomedical Engineering", "Petroleum Engineering",
    "Mining Engineering", "Metallurgical Engineering", "Production Engineering", "Automobile Engineering",
    "Marine Engineering", "Agricultural Engineering", "Data Science", "Artificial Intelligence",
    "Machine Learning", "Cyber Security", "Cloud Computing", "Robotics", "Mechatronics", "Physics",
    "Chemistry", "Mathematics", "Statistics", "Economics", "Psychology", "Sociology", "Political Science",
    "History", "Geography", "English Literature", "Philosophy", "Journalism", "Mass Communication",
    "Fashion Design", "Interior Design", "Graphic Design", "Animation", "Fine Arts", "Hotel Management",
    "Event Management", "Finance", "Marketing", "Human Resource Management", "Business Analytics",
    "International Business", "Supply Chain Management", "Operations Management", "Accounting",
    "Chartered Accountancy", "Company Secretary", "Actuarial Science", "Nursing", "Pharmacy",
    "Physiotherapy", "Nutrition and Dietetics", "Microbiology", "Zoology", "Botany", "Genetics",
    "Environmental Science", "Forensic Science", "Agriculture", "Horticulture", "Forestry", "Fisheries",
    "Veterinary Science", "Dairy Technology", "Food Technology", "Textile Engineering", "Architecture",
    "Urban Planning", "Law", "Corporate Law", "Criminal Law", "Public Administration", "Social Work",
    "Library Science", "Physical Education", "Aviation", "Pilot Training", "Merchant Navy", "Film Making",
    "Photography", "Music", "Dance", "Foreign Languages", "Digital Marketing", "Game Design",
];

pub const EXAMS: &[&str] = &[
    "JEE Main", "JEE Advanced", "NEET", "NEET PG", "GATE", "CAT", "XAT", "MAT", "CMAT", "SNAP", "NMAT",
    "GMAT", "GRE", "TOEFL", "IELTS", "SAT", "CLAT", "AILET", "LSAT", "UPSC", "UPSC CSE", "SSC CGL", "SSC CHSL",
    "IBPS PO", "IBPS Clerk", "SBI PO", "RBI Grade B", "NDA", "CDS", "AFCAT", "CUET", "BITSAT", "VITEEE",
    "SRMJEEE", "COMEDK", "MHT CET", "KCET", "WBJEE", "AP EAMCET", "TS EAMCET", "NIFT", "NID DAT", "UCEED",
    "CEED", "NATA", "JIPMER", "AIIMS", "CTET", "UGC NET", "CSIR NET", "JAM", "TANCET", "KMAT", "ATMA",
    "IIFT", "NCHMCT JEE", "GPAT", "PTE", "Duolingo English Test",
];

pub const JOB_ROLES: &[&str] = &[
    "software engineer", "software developer", "data scientist", "data analyst", "data engineer",
    "web developer", "frontend developer", "backend developer", "full stack developer", "mobile developer",
    "android developer", "ios developer", "devops engineer", "cloud architect", "system administrator",
    "network engineer", "security analyst", "machine learning engineer", "product manager", "project manager",
    "business analyst", "financial analyst", "investment banker", "chartered accountant", "auditor",
    "tax consultant", "marketing manager", "sales executive", "digital marketer", "content writer",
    "copywriter", "graphic designer", "ui designer", "ux designer", "video editor", "journalist",
    "civil engineer", "mechanical engineer", "electrical engineer", "chemical engineer", "site engineer",
    "quality analyst", "test engineer", "hr manager", "recruiter", "teacher", "professor", "lecturer",
    "research scientist", "lab technician", "pharmacist", "doctor", "nurse", "dentist", "physiotherapist",
    "lawyer", "legal advisor", "civil servant", "bank clerk", "bank manager", "police officer", "architect",
    "interior designer", "fashion designer", "chef", "hotel manager", "pilot", "air hostess", "consultant",
    "operations manager", "supply chain analyst", "logistics manager", "customer support executive",
    "technical writer", "game developer", "blockchain developer", "embedded engineer", "database administrator",
    "scrum master", "business development executive", "relationship manager", "economist", "statistician",
];

pub const SKILLS: &[&str] = &[
    "Python", "Java", "JavaScript", "TypeScript", "C++", "C programming", "Rust", "Golang", "Kotlin", "Swift",
    "SQL", "MySQL", "MongoDB", "PostgreSQL", "HTML", "CSS", "React", "Angular", "Node.js", "Django", "Flask",
    "Spring Boot", "Docker", "Kubernetes", "AWS", "Azure", "Google Cloud", "Linux", "Git", "Excel",
    "Power BI", "Tableau", "Tally", "Photoshop", "Illustrator", "Figma", "AutoCAD", "SolidWorks", "MATLAB",
    "deep learning", "natural language processing", "computer vision", "data visualization",
    "web scraping", "ethical hacking", "penetration testing", "public speaking", "spoken English",
    "communication skills", "creative writing", "video editing", "stock trading", "financial modelling",
    "search engine optimization", "social media marketing", "content marketing", "email marketing",
    "project management", "agile methodology", "six sigma", "leadership", "negotiation", "time management",
    "critical thinking", "problem solving", "french language", "german language", "japanese language",
    "spanish language", "sign language", "typing", "shorthand", "accounting basics", "GST filing",
    "blockchain", "cryptography", "embedded systems", "Arduino", "Raspberry Pi", "3D printing", "Unity",
    "Blender", "Android development", "app development", "system design", "data structures", "algorithms",
];

/// Syllables for pseudo-names of institutions and companies.
const SYLLABLES: &[&str] = &[
    "ra", "vi", "shan", "ka", "mo", "de", "pa", "ri", "su", "ta", "na", "li", "go", "ma", "ja", "ya", "ve",
    "ro", "bi", "ha", "ne", "du", "ke", "sa", "ni", "tu", "am", "ar", "in", "dra", "lo", "mi", "bha", "chi",
    "gu", "jo", "kri", "pra", "sha", "va", "ze", "an", "es", "or", "ul", "yo", "dev", "har", "nan", "sin",
];

/// Context vocabulary that pseudo-names must not collide with.
fn reserved() -> HashSet<String> {
    let mut set: HashSet<String> = HashSet::new();
    for cat in super::templates::CATEGORIES {
        for sub in cat.subcategories {
            for t in sub.templates {
                set.extend(normalize_phrase(t));
            }
        }
    }
    for w in super::noise::ARTICLES {
        set.insert(w.to_string());
    }
    set
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn near_reserved(word: &str, reserved: &[Vec<char>]) -> bool {
    let w: Vec<char> = word.chars().collect();
    reserved.iter().any(|r| osa_bounded(&w, r, 2).is_some())
}

/// `count` distinct pseudo-words of two or three syllables, each at least
/// three edits away from every template word.
pub fn pseudo_names(count: usize, rng: &mut impl Rng) -> Vec<String> {
    let reserved = reserved();
    let near: Vec<Vec<char>> = reserved.iter().map(|w| w.chars().collect()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=3);
        let word: String = (0..n).map(|_| *SYLLABLES.choose(rng).expect("non-empty")).collect();
        if word.len() >= 4 && !near_reserved(&word, &near) && seen.insert(word.clone()) {
            out.push(capitalize(&word));
        }
    }
    out
}

/// Entity values per type, in [`super::templates::ENTITY_TYPES`] order.
pub struct Lexicon {
    pub values: Vec<Vec<String>>,
}

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn compose(
    names: &[String],
    places: &[&str],
    patterns: &[&str],
    count: usize,
    rng: &mut impl Rng,
) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 50 {
        attempts += 1;
        let p = patterns.choose(rng).expect("non-empty");
        let v = p
            .replace("{n}", names.choose(rng).expect("non-empty"))
            .replace("{m}", names.choose(rng).expect("non-empty"))
            .replace("{p}", places.choose(rng).expect("non-empty"));
        if seen.insert(normalize_phrase(&v)) {
            out.push(v);
        }
    }
    out
}

/// Sizes of the generated lexicons.
#[derive(Debug, Clone, Copy)]
pub struct LexiconSizes {
    pub pseudo_names: usize,
    pub colleges: usize,
    pub universities: usize,
    pub coaching: usize,
    pub companies: usize,
    pub scholarships: usize,
}

impl Default for LexiconSizes {
    fn default() -> Self {
        LexiconSizes {
            pseudo_names: 4000,
            colleges: 1600,
            universities: 800,
            coaching: 900,
            companies: 1000,
            scholarships: 500,
        }
    }
}

pub fn build(sizes: LexiconSizes, rng: &mut impl Rng) -> Lexicon {
    let names = pseudo_names(sizes.pseudo_names, rng);
    let colleges = compose(
        &names,
        CITIES,
        &[
            "{n} College",
            "{n} {m} College",
            "Sri {n} {m} College",
            "{n} {m} Institute of Technology",
            "{n} College of Engineering",
            "{n} Institute of Technology",
            "{n} Institute of Management",
            "{n} College of Arts and Science",
            "{n} Medical College",
            "{p} College of Engineering",
            "{n} Engineering College {p}",
            "Government College {p}",
            "{n} Institute of Engineering and Technology",
            "{n} Law College",
        ],
        sizes.colleges,
        rng,
    );
    let universities = compose(
        &names,
        CITIES,
        &[
            "{n} University",
            "{n} {m} University",
            "University of {p}",
            "{p} University",
            "{n} Vidyapeeth",
            "{n} Deemed University",
            "{n} Technological University",
            "Central University of {p}",
        ],
        sizes.universities,
        rng,
    );
    let coaching = compose(
        &names,
        CITIES,
        &[
            "{n} Classes",
            "{n} {m} Classes",
            "{n} {m} Academy",
            "{n} Academy",
            "{n} Tutorials",
            "{n} Coaching Centre",
            "{n} Institute",
            "{n} Study Circle",
            "{n} Career Point",
            "{n} IAS Academy",
        ],
        sizes.coaching,
        rng,
    );
    let companies = compose(
        &names,
        CITIES,
        &[
            "{n} Technologies",
            "{n} {m} Technologies",
            "{n} {m} Private Limited",
            "{n} Infotech",
            "{n} Solutions",
            "{n} Systems",
            "{n} Labs",
            "{n} Consulting",
            "{n} Motors",
            "{n} Pharma",
            "{n} Bank",
            "{n} Industries",
            "{n}",
        ],
        sizes.companies,
        rng,
    );
    let scholarships = compose(
        &names,
        STATES,
        &[
            "{n} Scholarship",
            "{n} {m} Scholarship",
            "{n} Merit Scholarship",
            "{n} Foundation Scholarship",
            "{p} Post Matric Scholarship",
            "{n} Fellowship",
            "{n} Scholarship Scheme",
            "{p} Merit cum Means Scholarship",
        ],
        sizes.scholarships,
        rng,
    );
    let years = (2015..=2030).map(|y| y.to_string()).collect();
    let values = vec![
        owned(CITIES),
        owned(STATES),
        owned(COUNTRIES),
        owned(DEGREES),
        owned(COURSES),
        owned(EXAMS),
        colleges,
        universities,
        coaching,
        companies,
        owned(JOB_ROLES),
        owned(SKILLS),
        scholarships,
        years,
    ];
    Lexicon {
        values: dedup_across_types(values),
    }
}

/// Keeps the first occurrence of each normalized phrase across all types so
/// every phrase has exactly one type.
fn dedup_across_types(values: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut seen = HashSet::new();
    values
        .into_iter()
        .map(|vs| vs.into_iter().filter(|v| seen.insert(normalize_phrase(v))).collect())
        .collect()
}
